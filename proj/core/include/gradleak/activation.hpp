#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradleak/tensor.hpp"

namespace gradleak {

enum class ActivationKind {
    Sigmoid,
    Tanh,
    ArcTan,
    SoftPlus,
    ReLU,
    LeakyReLU,
    PReLU,
    ELU,
};

/// How much of the pre-activation can be recovered from the output alone.
enum class Invertibility { Full, Partial, None };

constexpr double kLeakyReluSlope = 0.01;

const char* activation_name(ActivationKind kind);
ActivationKind activation_from_name(const std::string& name);
bool activation_needs_alpha(ActivationKind kind);
Invertibility activation_invertibility(ActivationKind kind);

/// Elementwise forward application. `alpha` is consulted only for
/// PReLU/ELU.
Tensor activation_apply(const Tensor& input, ActivationKind kind, double alpha = 0.0);

double activation_apply_scalar(double o, ActivationKind kind, double alpha);

/// Tolerances for evaluating activation formulas on reconstructed
/// (noisy) outputs. Defaults are exact: any domain violation throws and
/// ReLU treats only x > 0 as positive.
struct ActivationTolerance {
    /// |x| <= zero_tol counts as an exact zero for ReLU outputs.
    double zero_tol = 0.0;
    /// Outputs out of domain by at most this much are clamped instead of
    /// rejected.
    double domain_slack = 0.0;
};

/// Derivative of the activation expressed purely in terms of its output
/// value. Throws ActivationDomainError when an entry cannot be an output
/// of the given activation.
Tensor activation_output_derivative(const Tensor& output, ActivationKind kind,
                                    double alpha = 0.0,
                                    const ActivationTolerance& tol = {});

/// Derivative at a known pre-activation value (exact backprop path).
Tensor activation_input_derivative(const Tensor& input, ActivationKind kind,
                                   double alpha = 0.0);

struct InvertOptions {
    ActivationTolerance tol;
    /// When positive, entries whose inverse would amplify output noise by
    /// more than this factor (1 / A'(o)) are reported unknown instead of
    /// inverted. 0 disables the guard.
    double max_gain = 0.0;
};

struct InvertedActivation {
    Tensor pre;                    // recovered pre-activation, 0 where unknown
    std::vector<std::uint8_t> known;  // per-element flag
    std::size_t known_count = 0;
};

/// Recover the pre-activation from the output. Fully invertible kinds
/// mark every entry known; ReLU marks zero outputs unknown.
InvertedActivation invert_activation(const Tensor& output, ActivationKind kind,
                                     double alpha = 0.0,
                                     const InvertOptions& opts = {});

}  // namespace gradleak
