#include "gradleak/conv.hpp"

namespace gradleak {

namespace {

void check_conv_shapes(const Tensor& input, const Tensor& weights,
                       const std::optional<Tensor>& bias, const ConvGeometry& geom) {
    geom.validate();
    const Shape in_want{geom.in_channels, geom.in_size, geom.in_size};
    if (input.shape() != in_want)
        throw ShapeError("conv input shape " + shape_to_string(input.shape()) +
                         " does not match geometry " + shape_to_string(in_want));
    const Shape w_want{geom.filters, geom.in_channels, geom.kernel, geom.kernel};
    if (weights.shape() != w_want)
        throw ShapeError("conv weight shape " + shape_to_string(weights.shape()) +
                         " does not match geometry " + shape_to_string(w_want));
    if (bias && bias->shape() != Shape{geom.filters})
        throw ShapeError("conv bias shape " + shape_to_string(bias->shape()) +
                         " does not match filter count " + std::to_string(geom.filters));
}

}  // namespace

Tensor im2col(const Tensor& input, const ConvGeometry& geom) {
    const std::size_t H = geom.in_size;
    const std::size_t K = geom.kernel;
    const std::size_t out = geom.out_size();
    const std::size_t patch = geom.in_channels * K * K;
    const long pad = static_cast<long>(geom.padding);

    Tensor col({patch, out * out});
    for (std::size_t n = 0; n < geom.in_channels; ++n) {
        for (std::size_t p = 0; p < K; ++p) {
            for (std::size_t q = 0; q < K; ++q) {
                const std::size_t row = (n * K + p) * K + q;
                for (std::size_t oy = 0; oy < out; ++oy) {
                    const long iy = static_cast<long>(oy * geom.stride + p) - pad;
                    if (iy < 0 || iy >= static_cast<long>(H)) continue;
                    for (std::size_t ox = 0; ox < out; ++ox) {
                        const long ix = static_cast<long>(ox * geom.stride + q) - pad;
                        if (ix < 0 || ix >= static_cast<long>(H)) continue;
                        col(row, oy * out + ox) =
                            input(n, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
                    }
                }
            }
        }
    }
    return col;
}

Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                      const std::optional<Tensor>& bias, const ConvGeometry& geom) {
    check_conv_shapes(input, weights, bias, geom);

    const std::size_t out = geom.out_size();
    const std::size_t patch = geom.in_channels * geom.kernel * geom.kernel;
    const Tensor col = im2col(input, geom);

    Tensor result({geom.filters, out, out});
    for (std::size_t f = 0; f < geom.filters; ++f) {
        const double b = bias ? (*bias)[f] : 0.0;
        double* dst = &result[f * out * out];
        for (std::size_t c = 0; c < out * out; ++c) dst[c] = b;
        for (std::size_t r = 0; r < patch; ++r) {
            const double w = weights[f * patch + r];
            if (w == 0.0) continue;
            const double* src = col.data().data() + r * out * out;
            for (std::size_t c = 0; c < out * out; ++c) dst[c] += w * src[c];
        }
    }
    return result;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (weights.ndim() != 2 || input.ndim() != 1 || bias.ndim() != 1 ||
        weights.dim(1) != input.size() || weights.dim(0) != bias.size())
        throw ShapeError("dense shapes disagree: W " + shape_to_string(weights.shape()) +
                         ", x " + shape_to_string(input.shape()) + ", b " +
                         shape_to_string(bias.shape()));

    const std::size_t units = weights.dim(0);
    const std::size_t in = weights.dim(1);
    Tensor z({units});
    for (std::size_t m = 0; m < units; ++m) {
        double acc = bias[m];
        const double* w = weights.data().data() + m * in;
        for (std::size_t n = 0; n < in; ++n) acc += w[n] * input[n];
        z[m] = acc;
    }
    return z;
}

}  // namespace gradleak
