#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gradleak/errors.hpp"

namespace gradleak {

using Shape = std::vector<std::size_t>;

std::size_t shape_product(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Dense n-dimensional array of doubles, row-major. Immutable by
/// convention once handed to another module; operations return fresh
/// tensors.
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(Shape shape);

    /// Tensor adopting `data`; data.size() must equal the shape product.
    Tensor(Shape shape, std::vector<double> data);

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t ndim() const { return shape_.size(); }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }
    const std::vector<double>& vec() const { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    /// 2-D access, shape [rows, cols].
    double operator()(std::size_t r, std::size_t c) const {
        return data_[r * shape_[1] + c];
    }
    double& operator()(std::size_t r, std::size_t c) {
        return data_[r * shape_[1] + c];
    }

    /// 3-D access, shape [channels, height, width].
    double operator()(std::size_t c, std::size_t y, std::size_t x) const {
        return data_[(c * shape_[1] + y) * shape_[2] + x];
    }
    double& operator()(std::size_t c, std::size_t y, std::size_t x) {
        return data_[(c * shape_[1] + y) * shape_[2] + x];
    }

    /// Same data, new shape (products must match).
    Tensor reshaped(Shape shape) const;

    bool all_finite() const;
    double max_abs() const;

    bool operator==(const Tensor& other) const = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

}  // namespace gradleak
