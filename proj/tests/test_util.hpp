#pragma once

// Shared helpers for the test suites: a deterministic RNG, independent
// brute-force reference implementations used as oracles, small architecture
// builders, and the central-difference harness.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "gradleak/conv.hpp"
#include "gradleak/model.hpp"
#include "gradleak/victim.hpp"

namespace testutil {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double urand(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline gradleak::Tensor random_tensor(std::mt19937_64& g, gradleak::Shape shape,
                                      double lo = -1.0, double hi = 1.0) {
    gradleak::Tensor t(std::move(shape));
    for (auto& v : t.data()) v = urand(g, lo, hi);
    return t;
}

// Quadruple-loop convolution, deliberately written without im2col or any
// shared code so it can serve as an independent oracle.
inline gradleak::Tensor reference_conv(const gradleak::Tensor& input,
                                       const gradleak::Tensor& weights,
                                       const std::optional<gradleak::Tensor>& bias,
                                       const gradleak::ConvGeometry& geom) {
    const std::size_t out = geom.out_size();
    const std::size_t K = geom.kernel;
    gradleak::Tensor result({geom.filters, out, out});
    for (std::size_t f = 0; f < geom.filters; ++f)
        for (std::size_t oy = 0; oy < out; ++oy)
            for (std::size_t ox = 0; ox < out; ++ox) {
                double acc = bias ? (*bias)[f] : 0.0;
                for (std::size_t c = 0; c < geom.in_channels; ++c)
                    for (std::size_t ky = 0; ky < K; ++ky)
                        for (std::size_t kx = 0; kx < K; ++kx) {
                            const long iy = long(oy * geom.stride + ky) - long(geom.padding);
                            const long ix = long(ox * geom.stride + kx) - long(geom.padding);
                            if (iy < 0 || ix < 0 || iy >= long(geom.in_size) ||
                                ix >= long(geom.in_size))
                                continue;
                            acc += weights[((f * geom.in_channels + c) * K + ky) * K + kx] *
                                   input(c, std::size_t(iy), std::size_t(ix));
                        }
                result(f, oy, ox) = acc;
            }
    return result;
}

struct ConvBlock {
    std::size_t filters = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    std::size_t padding = 0;
    gradleak::ActivationKind kind = gradleak::ActivationKind::ReLU;
    double alpha = 0.0;
    bool bias = false;
};

// conv+activation blocks, then flatten and a dense head; resolve() fills the
// inferred fields and validates the chain.
inline gradleak::ArchitectureSpec make_arch(std::size_t channels, std::size_t size,
                                            const std::vector<ConvBlock>& blocks,
                                            std::size_t units) {
    gradleak::ArchitectureSpec arch;
    arch.in_channels = channels;
    arch.in_height = size;
    arch.in_width = size;
    for (const auto& b : blocks) {
        gradleak::ConvLayer conv;
        conv.geom.filters = b.filters;
        conv.geom.kernel = b.kernel;
        conv.geom.stride = b.stride;
        conv.geom.padding = b.padding;
        conv.has_bias = b.bias;
        arch.layers.emplace_back(conv);
        arch.layers.emplace_back(gradleak::ActivationLayer{b.kind, b.alpha});
    }
    arch.layers.emplace_back(gradleak::FlattenLayer{});
    arch.layers.emplace_back(gradleak::DenseLayer{0, units});
    arch.resolve();
    return arch;
}

inline double loss_at(const gradleak::ArchitectureSpec& arch,
                      const gradleak::ParameterSet& params, const gradleak::Tensor& input,
                      std::size_t label) {
    const auto trace = gradleak::forward(arch, params, input);
    return gradleak::softmax_cross_entropy(trace.logits(), label).first;
}

// Central difference of the loss w.r.t. one parameter entry.
inline double fd_param_grad(const gradleak::ArchitectureSpec& arch,
                            const gradleak::ParameterSet& params, const gradleak::Tensor& input,
                            std::size_t label, std::size_t layer, bool bias_slot,
                            std::size_t idx, double h = 1e-6) {
    gradleak::ParameterSet p = params;
    gradleak::Tensor& t =
        bias_slot ? p.layers[layer].bias.value() : p.layers[layer].weights.value();
    const double orig = t[idx];
    t[idx] = orig + h;
    const double up = loss_at(arch, p, input, label);
    t[idx] = orig - h;
    const double down = loss_at(arch, p, input, label);
    return (up - down) / (2.0 * h);
}

// Central difference of the loss w.r.t. one entry of layer `first_layer`'s
// input (0 = the network input).
inline double fd_value_grad(const gradleak::ArchitectureSpec& arch,
                            const gradleak::ParameterSet& params, const gradleak::Tensor& value,
                            std::size_t label, std::size_t first_layer, std::size_t idx,
                            double h = 1e-6) {
    gradleak::Tensor v = value;
    const double orig = v[idx];
    v[idx] = orig + h;
    const double up = gradleak::softmax_cross_entropy(
                          gradleak::forward_from(arch, params, first_layer, v), label)
                          .first;
    v[idx] = orig - h;
    const double down = gradleak::softmax_cross_entropy(
                            gradleak::forward_from(arch, params, first_layer, v), label)
                            .first;
    return (up - down) / (2.0 * h);
}

// The tolerance convention used throughout: absolute error on small values,
// relative on large ones.
inline double rel_err(double analytic, double other) {
    return std::abs(analytic - other) / (1.0 + std::abs(analytic));
}

}  // namespace testutil
