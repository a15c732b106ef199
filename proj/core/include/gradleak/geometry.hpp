#pragma once

#include <cstddef>
#include <string>

#include "gradleak/errors.hpp"

namespace gradleak {

/// Square 2-D convolution geometry with symmetric zero padding.
/// The output size (in_size + 2*padding - kernel)/stride + 1 must be an
/// exact integer >= 1.
struct ConvGeometry {
    std::size_t in_channels = 0;
    std::size_t in_size = 0;
    std::size_t filters = 0;
    std::size_t kernel = 0;
    std::size_t stride = 1;
    std::size_t padding = 0;

    std::size_t out_size() const {
        return (in_size + 2 * padding - kernel) / stride + 1;
    }

    std::size_t input_count() const { return in_channels * in_size * in_size; }
    std::size_t output_count() const { return filters * out_size() * out_size(); }
    std::size_t weight_count() const { return filters * in_channels * kernel * kernel; }

    void validate() const {
        if (in_channels == 0 || in_size == 0 || filters == 0 || kernel == 0 || stride == 0)
            throw ShapeError("conv geometry fields must be positive");
        const std::size_t padded = in_size + 2 * padding;
        if (kernel > padded)
            throw ShapeError("kernel " + std::to_string(kernel) +
                             " exceeds padded input size " + std::to_string(padded));
        if ((padded - kernel) % stride != 0)
            throw ShapeError("stride " + std::to_string(stride) +
                             " does not divide padded span " + std::to_string(padded - kernel));
    }

    bool operator==(const ConvGeometry&) const = default;
};

}  // namespace gradleak
