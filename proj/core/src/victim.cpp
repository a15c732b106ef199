#include "gradleak/victim.hpp"

#include <cmath>

#include "gradleak/conv.hpp"
#include "gradleak/errors.hpp"
#include "gradleak/serde.hpp"

namespace gradleak {

namespace {

Tensor apply_layer(const LayerSpec& layer, const LayerParams& slot, const Tensor& x) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer))
        return conv2d_forward(x, *slot.weights, slot.bias, conv->geom);
    if (const auto* act = std::get_if<ActivationLayer>(&layer))
        return activation_apply(x, act->kind, act->alpha);
    if (std::holds_alternative<FlattenLayer>(layer)) return x.reshaped({x.size()});
    return dense_forward(x, *slot.weights, *slot.bias);
}

void check_input_shape(const ArchitectureSpec& arch, const Tensor& input) {
    if (input.ndim() == 4)
        throw ShapeError("input has a batch dimension; the pipeline handles one sample at a time");
    if (input.shape() != arch.input_shape())
        throw ShapeError("input shape " + shape_to_string(input.shape()) +
                         " != architecture input " + shape_to_string(arch.input_shape()));
}

}  // namespace

ForwardTrace forward(const ArchitectureSpec& arch, const ParameterSet& params,
                     const Tensor& input) {
    check_input_shape(arch, input);
    check_parameters(arch, params);

    ForwardTrace trace;
    trace.values.reserve(arch.layers.size() + 1);
    trace.values.push_back(input);
    for (std::size_t i = 0; i < arch.layers.size(); ++i)
        trace.values.push_back(apply_layer(arch.layers[i], params.layers[i], trace.values.back()));
    return trace;
}

Tensor forward_from(const ArchitectureSpec& arch, const ParameterSet& params,
                    std::size_t first_layer, const Tensor& value) {
    if (first_layer > arch.layers.size())
        throw ShapeError("layer index " + std::to_string(first_layer) + " out of range");
    Tensor x = value;
    for (std::size_t i = first_layer; i < arch.layers.size(); ++i)
        x = apply_layer(arch.layers[i], params.layers[i], x);
    return x;
}

std::pair<double, Tensor> softmax_cross_entropy(const Tensor& logits, std::size_t label) {
    const std::size_t c = logits.size();
    if (logits.ndim() != 1 || c == 0)
        throw ShapeError("logits must be a non-empty vector, got " +
                         shape_to_string(logits.shape()));
    if (label >= c)
        throw ShapeError("label " + std::to_string(label) + " out of range for " +
                         std::to_string(c) + " classes");

    double zmax = logits[0];
    for (std::size_t i = 1; i < c; ++i) zmax = std::max(zmax, logits[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < c; ++i) sum += std::exp(logits[i] - zmax);
    const double lse = zmax + std::log(sum);

    Tensor dlogits({c});
    for (std::size_t i = 0; i < c; ++i) dlogits[i] = std::exp(logits[i] - lse);
    dlogits[label] -= 1.0;
    return {lse - logits[label], dlogits};
}

GradientBundle backward(const ArchitectureSpec& arch, const ParameterSet& params,
                        const ForwardTrace& trace, const Tensor& dlogits) {
    check_parameters(arch, params);
    if (trace.values.size() != arch.layers.size() + 1)
        throw ShapeError("trace has " + std::to_string(trace.values.size()) +
                         " values for an architecture with " +
                         std::to_string(arch.layers.size()) + " layers");
    if (dlogits.shape() != trace.logits().shape())
        throw ShapeError("dlogits shape " + shape_to_string(dlogits.shape()) +
                         " != logits shape " + shape_to_string(trace.logits().shape()));

    GradientBundle grads;
    grads.arch_hash = params.arch_hash.empty() ? arch_hash(arch) : params.arch_hash;
    grads.layers.resize(arch.layers.size());

    // Walk backward with g = gradient at the current layer's output. The
    // loops below are deliberately direct index arithmetic with no shared
    // machinery, so they can serve as an independent reference for the
    // attack-side reconstruction of the same quantities.
    Tensor g = dlogits;
    for (std::size_t i = arch.layers.size(); i-- > 0;) {
        const Tensor& x = trace.layer_input(i);

        if (const auto* dense = std::get_if<DenseLayer>(&arch.layers[i])) {
            const Tensor& w = *params.layers[i].weights;
            Tensor dw({dense->units, dense->in_features});
            for (std::size_t m = 0; m < dense->units; ++m)
                for (std::size_t n = 0; n < dense->in_features; ++n) dw(m, n) = g[m] * x[n];
            grads.layers[i].weights = std::move(dw);
            grads.layers[i].bias = g;

            Tensor dx({dense->in_features});
            for (std::size_t n = 0; n < dense->in_features; ++n) {
                double acc = 0.0;
                for (std::size_t m = 0; m < dense->units; ++m) acc += g[m] * w(m, n);
                dx[n] = acc;
            }
            g = std::move(dx);
        } else if (std::holds_alternative<FlattenLayer>(arch.layers[i])) {
            g = g.reshaped(x.shape());
        } else if (const auto* act = std::get_if<ActivationLayer>(&arch.layers[i])) {
            const Tensor deriv = activation_input_derivative(x, act->kind, act->alpha);
            for (std::size_t e = 0; e < g.size(); ++e) g[e] *= deriv[e];
        } else {
            const auto& geom = std::get<ConvLayer>(arch.layers[i]).geom;
            const Tensor& w = *params.layers[i].weights;
            const std::size_t out = geom.out_size();
            const long pad = static_cast<long>(geom.padding);
            const long H = static_cast<long>(geom.in_size);

            Tensor dw({geom.filters, geom.in_channels, geom.kernel, geom.kernel});
            Tensor db({geom.filters});
            Tensor dx({geom.in_channels, geom.in_size, geom.in_size});
            for (std::size_t f = 0; f < geom.filters; ++f) {
                for (std::size_t oy = 0; oy < out; ++oy) {
                    for (std::size_t ox = 0; ox < out; ++ox) {
                        const double go = g[(f * out + oy) * out + ox];
                        db[f] += go;
                        if (go == 0.0) continue;
                        for (std::size_t n = 0; n < geom.in_channels; ++n) {
                            for (std::size_t p = 0; p < geom.kernel; ++p) {
                                const long iy = static_cast<long>(oy * geom.stride + p) - pad;
                                if (iy < 0 || iy >= H) continue;
                                for (std::size_t q = 0; q < geom.kernel; ++q) {
                                    const long ix = static_cast<long>(ox * geom.stride + q) - pad;
                                    if (ix < 0 || ix >= H) continue;
                                    const double xv =
                                        x(n, static_cast<std::size_t>(iy),
                                          static_cast<std::size_t>(ix));
                                    dw[((f * geom.in_channels + n) * geom.kernel + p) *
                                           geom.kernel +
                                       q] += go * xv;
                                    dx(n, static_cast<std::size_t>(iy),
                                       static_cast<std::size_t>(ix)) +=
                                        go * w[((f * geom.in_channels + n) * geom.kernel + p) *
                                                   geom.kernel +
                                               q];
                                }
                            }
                        }
                    }
                }
            }
            grads.layers[i].weights = std::move(dw);
            if (std::get<ConvLayer>(arch.layers[i]).has_bias) grads.layers[i].bias = std::move(db);
            g = std::move(dx);
        }
    }
    return grads;
}

GradientBundle compute_gradients(const ArchitectureSpec& arch, const ParameterSet& params,
                                 const Tensor& input, std::size_t label, std::uint64_t seed) {
    ForwardTrace trace = forward(arch, params, input);
    auto [loss, dlogits] = softmax_cross_entropy(trace.logits(), label);
    GradientBundle grads = backward(arch, params, trace, dlogits);
    grads.seed = seed;
    grads.loss = loss;
    return grads;
}

}  // namespace gradleak
