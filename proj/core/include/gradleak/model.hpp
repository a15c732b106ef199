#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gradleak/activation.hpp"
#include "gradleak/geometry.hpp"
#include "gradleak/tensor.hpp"

namespace gradleak {

// Layer descriptors. Conv geometry input fields (in_channels, in_size) are
// filled during shape inference, as is Dense::in_features; the parser only
// knows filters/kernel/stride/padding and units.
struct ConvLayer {
    ConvGeometry geom;
    bool has_bias = false;
};

struct ActivationLayer {
    ActivationKind kind = ActivationKind::ReLU;
    double alpha = 0.0;
};

struct FlattenLayer {};

struct DenseLayer {
    std::size_t in_features = 0;
    std::size_t units = 0;
};

using LayerSpec = std::variant<ConvLayer, ActivationLayer, FlattenLayer, DenseLayer>;

const char* layer_type_name(const LayerSpec& layer);

struct ArchitectureSpec {
    std::size_t in_channels = 0;
    std::size_t in_height = 0;
    std::size_t in_width = 0;
    std::vector<LayerSpec> layers;

    // Runs shape inference over the layer chain, filling the inferred fields
    // above, and enforces the structural rules: square input, every conv
    // immediately followed by an activation, exactly one flatten, exactly one
    // dense which is last. Throws ShapeError naming the first offending layer.
    void resolve();

    Shape input_shape() const { return {in_channels, in_height, in_width}; }

    // Shape after each layer; entry 0 is the input shape, entry i+1 the
    // output of layer i. Requires resolve() to have run.
    std::vector<Shape> layer_shapes() const;

    std::size_t logits_size() const;
};

// Parameter slot for one layer. Activation and flatten layers keep both
// fields empty; conv layers may have no bias.
struct LayerParams {
    std::optional<Tensor> weights;
    std::optional<Tensor> bias;
};

struct ParameterSet {
    std::string arch_hash;
    std::vector<LayerParams> layers;
};

// The per-parameter gradients leaked by one victim training step, aligned
// layer-for-layer with ParameterSet. seed and loss are informational
// metadata; the attack never reads them.
struct GradientBundle {
    std::string arch_hash;
    std::uint64_t seed = 0;
    double loss = 0.0;
    std::vector<LayerParams> layers;
};

// FNV-1a 64 digest of the canonical architecture serialization, as a 16-char
// hex string. Used only to detect mismatched (arch, params, grads) triples.
std::string arch_hash(const ArchitectureSpec& arch);

// Deterministic uniform init: weights from [-0.5, 0.5], biases from
// [-0.1, 0.1]. Same (arch, seed) always yields the same ParameterSet.
ParameterSet init_parameters(const ArchitectureSpec& arch, std::uint64_t seed);

// Shape-checks a container against the architecture. Throws ShapeError on
// layer-count or tensor-shape mismatch; hash mismatches throw Error.
void check_parameters(const ArchitectureSpec& arch, const ParameterSet& params);
void check_gradients(const ArchitectureSpec& arch, const GradientBundle& grads);

}  // namespace gradleak
