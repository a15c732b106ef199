#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gradleak/model.hpp"
#include "gradleak/tensor.hpp"

namespace gradleak {

// Every intermediate of one forward pass. values[0] is the network input and
// values[i + 1] the output of layer i, so the input of layer i is values[i]
// and the logits are values.back().
struct ForwardTrace {
    std::vector<Tensor> values;
    double loss = 0.0;

    const Tensor& logits() const { return values.back(); }
    const Tensor& layer_input(std::size_t i) const { return values[i]; }
    const Tensor& layer_output(std::size_t i) const { return values[i + 1]; }
};

// Runs the full forward pass. Throws ShapeError when the input does not
// match the architecture's input shape (a leading batch dimension is
// rejected; the pipeline handles exactly one sample).
ForwardTrace forward(const ArchitectureSpec& arch, const ParameterSet& params,
                     const Tensor& input);

// Forward from layer `first_layer` onward, treating `value` as that layer's
// input. Used by finite-difference checks that perturb intermediates.
Tensor forward_from(const ArchitectureSpec& arch, const ParameterSet& params,
                    std::size_t first_layer, const Tensor& value);

// loss = -log softmax(logits)[label]; dlogits = softmax(logits) - onehot.
// Computed with the log-sum-exp shift so large logits stay finite.
std::pair<double, Tensor> softmax_cross_entropy(const Tensor& logits, std::size_t label);

// Exact chain-rule gradients for every parameterized layer. dlogits is the
// loss gradient at the logits; the trace must come from forward() on the
// same (arch, params).
GradientBundle backward(const ArchitectureSpec& arch, const ParameterSet& params,
                        const ForwardTrace& trace, const Tensor& dlogits);

// forward + softmax_cross_entropy + backward in one call; fills the bundle's
// seed and loss metadata.
GradientBundle compute_gradients(const ArchitectureSpec& arch, const ParameterSet& params,
                                 const Tensor& input, std::size_t label, std::uint64_t seed = 0);

}  // namespace gradleak
