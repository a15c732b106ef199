#pragma once

#include "gradleak/tensor.hpp"

namespace gradleak {

// Image-quality numbers over normalized [0,1] pixels.
struct Metrics {
    double mse = 0.0;
    double psnr = 0.0;  // +inf when mse == 0
    double wall_time = 0.0;
};

double mean_squared_error(const Tensor& a, const Tensor& b);

// 10 * log10(1 / mse) with peak value 1; +inf at mse == 0.
double psnr_from_mse(double mse);

Metrics evaluate_images(const Tensor& original, const Tensor& reconstructed);

}  // namespace gradleak
