#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gradleak/linsys.hpp"
#include "gradleak/maps.hpp"
#include "gradleak/model.hpp"
#include "gradleak/tensor.hpp"

namespace gradleak {

struct AttackOptions {
    // Stack forward-pass (weight) constraints on top of the gradient
    // constraints. Disabling reproduces the gradient-rows-only setting.
    bool use_weight_constraints = true;
    // Average the dense-input estimate over every qualifying output node
    // instead of using only the best-conditioned one.
    bool fc_averaging = false;

    // Relative rank threshold for the stacked solves.
    double rank_eps = 1e-10;
    // |db| below this never qualifies as the division node.
    double div_eps = 1e-12;
    // Reconstructed activation outputs within zero_tol of 0 count as exact
    // zeros for ReLU masks, absorbing solver noise on inactive units.
    double zero_tol = 1e-7;
    // Inversion entries whose local amplification 1/A'(O) exceeds max_gain
    // are treated as unknown rather than risking blown-up pre-activations.
    double max_gain = 1e6;
    // Values this far outside an activation's open output range are clamped
    // instead of rejected (solver noise at the domain edge).
    double domain_slack = 1e-9;
};

struct LayerDiagnostics {
    std::size_t layer_index = 0;
    std::string layer_type;
    std::size_t n_weight_constraints = 0;
    std::size_t n_gradient_constraints = 0;
    std::size_t n_unknowns = 0;
    std::size_t matrix_rank = 0;
    double residual_norm = 0.0;
};

// Per-layer witness of the recursion: the reconstructed layer input, the
// gradient with respect to it, and the solve diagnostics.
struct LayerSolveState {
    Tensor X;
    Tensor dX;
    std::vector<std::uint8_t> known_mask;
    LayerDiagnostics diagnostics;
};

struct ReconstructionReport {
    Tensor input;
    std::vector<LayerSolveState> layers;
    double wall_time_seconds = 0.0;
    // Filled by the caller when the original input is available.
    std::optional<double> mse;
    std::optional<double> psnr;
};

// Dense-layer input from its own gradients: x_n = dW[m*,n] / db[m*], with m*
// the node of largest |db|. Throws BiasGradientsZeroError when no node
// exceeds div_eps.
Tensor recover_fc_input(const Tensor& dW_fc, const Tensor& db_fc, bool averaging = false,
                        double div_eps = 1e-12);

// Same recovery pinned to one output node m; the property suite checks that
// every qualifying node yields the same input.
Tensor recover_fc_input_at(const Tensor& dW_fc, const Tensor& db_fc, std::size_t m);

// Gradient with respect to the dense input: dX[n] = sum_m db[m] * W[m,n].
// dW participates only in shape validation.
Tensor fc_input_gradient(const Tensor& dW_fc, const Tensor& db_fc, const Tensor& W_fc);

// dO = dX elementwise-times A'(O), with A' expressed in the output X alone.
Tensor propagate_gradient_through_activation(const Tensor& dX, const Tensor& X,
                                             ActivationKind kind, double alpha = 0.0,
                                             ActivationTolerance tol = {});

// One row per conv weight entry: sum over that weight's output hits of
// dO[out] * X[in] equals the leaked dW entry. Unknowns are the layer input
// in (channel, row, col) row-major order.
LinearSystem build_gradient_constraints(const Tensor& dO, const Tensor& dW_conv,
                                        const ContributionMaps& maps);

// One row per known conv output element: the forward dot product of the
// kernel with the input patch equals O - bias. known runs over the flat
// (filter, row, col) output index; bias may be null.
LinearSystem build_weight_constraints(const Tensor& O, const std::vector<std::uint8_t>& known,
                                      const Tensor& weights, const Tensor* bias,
                                      const ContributionMaps& maps);

// dX[n] = sum over output hits of dO * w, accumulated across filters.
Tensor conv_input_gradient(const Tensor& dO, const Tensor& weights, const ContributionMaps& maps);

// Least-squares solve of the stacked constraint system, reshaped to the conv
// input shape. Throws RankDeficientError (without a layer index) when the
// stacked matrix cannot determine every unknown.
LayerSolveState solve_layer_input(const LinearSystem& gradient_rows,
                                  const LinearSystem& weight_rows, const ConvGeometry& geom,
                                  double rank_eps);

// Full recursion from the dense layer back to the network input.
ReconstructionReport run_attack(const ArchitectureSpec& arch, const ParameterSet& params,
                                const GradientBundle& grads, const AttackOptions& opts = {});

// The stacked system run_attack would solve for conv layer conv_idx: walks
// the recursion from the dense layer down, solving the layers behind it,
// and returns that layer's constraint rows unsolved (weight rows first).
// Feeds the rank audit's empirical column.
LinearSystem assemble_layer_system(const ArchitectureSpec& arch, const ParameterSet& params,
                                   const GradientBundle& grads, std::size_t conv_idx,
                                   const AttackOptions& opts = {});

}  // namespace gradleak
