#include "gradleak/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gradleak/errors.hpp"

namespace gradleak {

namespace {

std::string layer_err(std::size_t index, const char* type, const std::string& what) {
    std::ostringstream os;
    os << "layer " << index << " (" << type << "): " << what;
    return os.str();
}

// One uniform draw in [lo, hi]. The explicit 53-bit mantissa conversion keeps
// the stream identical across standard libraries, unlike
// std::uniform_real_distribution which is implementation-defined.
double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    return lo + u * (hi - lo);
}

Tensor random_tensor(std::mt19937_64& rng, Shape shape, double lo, double hi) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = uniform_in(rng, lo, hi);
    return t;
}

}  // namespace

const char* layer_type_name(const LayerSpec& layer) {
    struct Visitor {
        const char* operator()(const ConvLayer&) const { return "conv"; }
        const char* operator()(const ActivationLayer&) const { return "activation"; }
        const char* operator()(const FlattenLayer&) const { return "flatten"; }
        const char* operator()(const DenseLayer&) const { return "dense"; }
    };
    return std::visit(Visitor{}, layer);
}

void ArchitectureSpec::resolve() {
    if (in_channels == 0 || in_height == 0 || in_width == 0)
        throw ShapeError("input shape must have positive channels, height, width");
    if (in_height != in_width)
        throw ShapeError("input must be square, got " + std::to_string(in_height) + "x" +
                         std::to_string(in_width));

    // Walk the chain enforcing the (conv activation)* flatten dense structure
    // while filling the inferred geometry fields.
    std::size_t channels = in_channels;
    std::size_t size = in_height;
    enum class Expect { ConvOrFlatten, Activation, Dense, End };
    Expect expect = Expect::ConvOrFlatten;
    std::size_t flat_size = 0;

    for (std::size_t i = 0; i < layers.size(); ++i) {
        const char* type = layer_type_name(layers[i]);
        switch (expect) {
            case Expect::ConvOrFlatten:
                if (auto* conv = std::get_if<ConvLayer>(&layers[i])) {
                    conv->geom.in_channels = channels;
                    conv->geom.in_size = size;
                    try {
                        conv->geom.validate();
                    } catch (const ShapeError& e) {
                        throw ShapeError(layer_err(i, type, e.what()));
                    }
                    channels = conv->geom.filters;
                    size = conv->geom.out_size();
                    expect = Expect::Activation;
                } else if (std::holds_alternative<FlattenLayer>(layers[i])) {
                    flat_size = channels * size * size;
                    expect = Expect::Dense;
                } else {
                    throw ShapeError(layer_err(i, type, "expected conv or flatten here"));
                }
                break;
            case Expect::Activation: {
                auto* act = std::get_if<ActivationLayer>(&layers[i]);
                if (!act)
                    throw ShapeError(layer_err(i, type, "every conv must be followed by an activation"));
                if (activation_needs_alpha(act->kind) &&
                    !(std::isfinite(act->alpha) && act->alpha > 0.0))
                    throw ShapeError(layer_err(i, type, std::string(activation_name(act->kind)) +
                                                            " requires a positive alpha"));
                expect = Expect::ConvOrFlatten;
                break;
            }
            case Expect::Dense: {
                auto* dense = std::get_if<DenseLayer>(&layers[i]);
                if (!dense)
                    throw ShapeError(layer_err(i, type, "expected dense immediately after flatten"));
                if (dense->units == 0)
                    throw ShapeError(layer_err(i, type, "dense units must be positive"));
                dense->in_features = flat_size;
                expect = Expect::End;
                break;
            }
            case Expect::End:
                throw ShapeError(layer_err(i, type, "no layers allowed after the dense layer"));
        }
    }
    if (expect != Expect::End)
        throw ShapeError("architecture must end with flatten followed by a dense layer");
}

std::vector<Shape> ArchitectureSpec::layer_shapes() const {
    std::vector<Shape> shapes;
    shapes.reserve(layers.size() + 1);
    shapes.push_back(input_shape());
    for (const auto& layer : layers) {
        if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
            const std::size_t out = conv->geom.out_size();
            shapes.push_back({conv->geom.filters, out, out});
        } else if (std::holds_alternative<ActivationLayer>(layer)) {
            shapes.push_back(shapes.back());
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            shapes.push_back({shape_product(shapes.back())});
        } else {
            shapes.push_back({std::get<DenseLayer>(layer).units});
        }
    }
    return shapes;
}

std::size_t ArchitectureSpec::logits_size() const {
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
        if (const auto* dense = std::get_if<DenseLayer>(&*it)) return dense->units;
    throw ShapeError("architecture has no dense layer");
}

ParameterSet init_parameters(const ArchitectureSpec& arch, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ParameterSet params;
    params.arch_hash = arch_hash(arch);
    params.layers.resize(arch.layers.size());

    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        if (const auto* conv = std::get_if<ConvLayer>(&arch.layers[i])) {
            const auto& g = conv->geom;
            params.layers[i].weights =
                random_tensor(rng, {g.filters, g.in_channels, g.kernel, g.kernel}, -0.5, 0.5);
            if (conv->has_bias)
                params.layers[i].bias = random_tensor(rng, {g.filters}, -0.1, 0.1);
        } else if (const auto* dense = std::get_if<DenseLayer>(&arch.layers[i])) {
            params.layers[i].weights =
                random_tensor(rng, {dense->units, dense->in_features}, -0.5, 0.5);
            params.layers[i].bias = random_tensor(rng, {dense->units}, -0.1, 0.1);
        }
    }
    return params;
}

namespace {

void check_layer_tensors(const ArchitectureSpec& arch, const std::vector<LayerParams>& layers,
                         const char* what, bool require_finite) {
    if (layers.size() != arch.layers.size())
        throw ShapeError(std::string(what) + ": " + std::to_string(layers.size()) +
                         " layer entries for an architecture with " +
                         std::to_string(arch.layers.size()) + " layers");

    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const auto& slot = layers[i];
        Shape want_w, want_b;
        bool want_bias = false;
        if (const auto* conv = std::get_if<ConvLayer>(&arch.layers[i])) {
            const auto& g = conv->geom;
            want_w = {g.filters, g.in_channels, g.kernel, g.kernel};
            want_b = {g.filters};
            want_bias = conv->has_bias;
        } else if (const auto* dense = std::get_if<DenseLayer>(&arch.layers[i])) {
            want_w = {dense->units, dense->in_features};
            want_b = {dense->units};
            want_bias = true;
        } else {
            if (slot.weights || slot.bias)
                throw ShapeError(layer_err(i, layer_type_name(arch.layers[i]),
                                           std::string(what) + " carries tensors for a "
                                           "parameterless layer"));
            continue;
        }

        if (!slot.weights)
            throw ShapeError(layer_err(i, layer_type_name(arch.layers[i]),
                                       std::string(what) + " is missing weights"));
        if (slot.weights->shape() != want_w)
            throw ShapeError(layer_err(i, layer_type_name(arch.layers[i]),
                                       std::string(what) + " weights shape " +
                                       shape_to_string(slot.weights->shape()) + " != expected " +
                                       shape_to_string(want_w)));
        if (want_bias) {
            if (!slot.bias)
                throw ShapeError(layer_err(i, layer_type_name(arch.layers[i]),
                                           std::string(what) + " is missing bias"));
            if (slot.bias->shape() != want_b)
                throw ShapeError(layer_err(i, layer_type_name(arch.layers[i]),
                                           std::string(what) + " bias shape " +
                                           shape_to_string(slot.bias->shape()) + " != expected " +
                                           shape_to_string(want_b)));
        } else if (slot.bias) {
            throw ShapeError(layer_err(i, layer_type_name(arch.layers[i]),
                                       std::string(what) + " carries a bias the architecture "
                                       "does not declare"));
        }

        if (require_finite) {
            if (!slot.weights->all_finite() || (slot.bias && !slot.bias->all_finite()))
                throw ShapeError(layer_err(i, layer_type_name(arch.layers[i]),
                                           std::string(what) + " contains non-finite entries"));
        }
    }
}

}  // namespace

void check_parameters(const ArchitectureSpec& arch, const ParameterSet& params) {
    check_layer_tensors(arch, params.layers, "parameter set", false);
    if (!params.arch_hash.empty() && params.arch_hash != arch_hash(arch))
        throw Error("parameter set hash " + params.arch_hash +
                    " does not match architecture hash " + arch_hash(arch));
}

void check_gradients(const ArchitectureSpec& arch, const GradientBundle& grads) {
    check_layer_tensors(arch, grads.layers, "gradient bundle", true);
    if (!grads.arch_hash.empty() && grads.arch_hash != arch_hash(arch))
        throw Error("gradient bundle hash " + grads.arch_hash +
                    " does not match architecture hash " + arch_hash(arch));
}

}  // namespace gradleak
