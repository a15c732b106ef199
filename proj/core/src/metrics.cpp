#include "gradleak/metrics.hpp"

#include <cmath>
#include <limits>

#include "gradleak/errors.hpp"

namespace gradleak {

double mean_squared_error(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape())
        throw ShapeError("cannot compare " + shape_to_string(a.shape()) + " with " +
                         shape_to_string(b.shape()));
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr_from_mse(double mse) {
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

Metrics evaluate_images(const Tensor& original, const Tensor& reconstructed) {
    Metrics m;
    m.mse = mean_squared_error(original, reconstructed);
    m.psnr = psnr_from_mse(m.mse);
    return m;
}

}  // namespace gradleak
