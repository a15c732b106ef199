#include "gradleak/attack.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "gradleak/errors.hpp"

namespace gradleak {

namespace {

void check_fc_shapes(const Tensor& dW, const Tensor& db) {
    if (dW.ndim() != 2)
        throw ShapeError("dense weight gradient must be 2-d, got " +
                         shape_to_string(dW.shape()));
    if (db.ndim() != 1 || db.dim(0) != dW.dim(0))
        throw ShapeError("dense bias gradient shape " + shape_to_string(db.shape()) +
                         " does not match weight gradient " + shape_to_string(dW.shape()));
}

}  // namespace

Tensor recover_fc_input(const Tensor& dW_fc, const Tensor& db_fc, bool averaging,
                        double div_eps) {
    check_fc_shapes(dW_fc, db_fc);
    const std::size_t c = dW_fc.dim(0);
    const std::size_t n = dW_fc.dim(1);

    std::size_t best = c;
    double best_abs = div_eps;
    for (std::size_t m = 0; m < c; ++m) {
        const double a = std::abs(db_fc[m]);
        if (a > best_abs) {
            best_abs = a;
            best = m;
        }
    }
    if (best == c) {
        char eps[32];
        std::snprintf(eps, sizeof(eps), "%g", div_eps);
        throw BiasGradientsZeroError(std::string("no dense bias gradient exceeds ") + eps +
                                     "; input recovery cannot start");
    }

    if (!averaging) return recover_fc_input_at(dW_fc, db_fc, best);

    Tensor x({n});
    std::size_t used = 0;
    for (std::size_t m = 0; m < c; ++m) {
        if (std::abs(db_fc[m]) <= div_eps) continue;
        const double inv = 1.0 / db_fc[m];
        for (std::size_t j = 0; j < n; ++j) x[j] += dW_fc(m, j) * inv;
        ++used;
    }
    for (std::size_t j = 0; j < n; ++j) x[j] /= static_cast<double>(used);
    return x;
}

Tensor recover_fc_input_at(const Tensor& dW_fc, const Tensor& db_fc, std::size_t m) {
    check_fc_shapes(dW_fc, db_fc);
    if (m >= db_fc.size())
        throw ShapeError("node index " + std::to_string(m) + " out of range for " +
                         std::to_string(db_fc.size()) + " outputs");
    if (db_fc[m] == 0.0)
        throw BiasGradientsZeroError("bias gradient of node " + std::to_string(m) +
                                     " is exactly zero");
    const std::size_t n = dW_fc.dim(1);
    Tensor x({n});
    const double inv = 1.0 / db_fc[m];
    for (std::size_t j = 0; j < n; ++j) x[j] = dW_fc(m, j) * inv;
    return x;
}

Tensor fc_input_gradient(const Tensor& dW_fc, const Tensor& db_fc, const Tensor& W_fc) {
    check_fc_shapes(dW_fc, db_fc);
    if (W_fc.shape() != dW_fc.shape())
        throw ShapeError("dense weights shape " + shape_to_string(W_fc.shape()) +
                         " does not match weight gradient " + shape_to_string(dW_fc.shape()));
    const std::size_t c = W_fc.dim(0);
    const std::size_t n = W_fc.dim(1);
    Tensor dx({n});
    for (std::size_t m = 0; m < c; ++m) {
        const double g = db_fc[m];
        if (g == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) dx[j] += g * W_fc(m, j);
    }
    return dx;
}

Tensor propagate_gradient_through_activation(const Tensor& dX, const Tensor& X,
                                             ActivationKind kind, double alpha,
                                             ActivationTolerance tol) {
    if (dX.shape() != X.shape())
        throw ShapeError("gradient shape " + shape_to_string(dX.shape()) +
                         " does not match output shape " + shape_to_string(X.shape()));
    Tensor dO = activation_output_derivative(X, kind, alpha, tol);
    for (std::size_t i = 0; i < dO.size(); ++i) dO[i] *= dX[i];
    return dO;
}

LinearSystem build_gradient_constraints(const Tensor& dO, const Tensor& dW_conv,
                                        const ContributionMaps& maps) {
    const ConvGeometry& g = maps.geom;
    const std::size_t out = g.out_size();
    const std::size_t k2 = g.kernel * g.kernel;
    if (dO.shape() != Shape{g.filters, out, out})
        throw ShapeError("output gradient shape " + shape_to_string(dO.shape()) +
                         " does not match geometry");
    if (dW_conv.shape() != Shape{g.filters, g.in_channels, g.kernel, g.kernel})
        throw ShapeError("weight gradient shape " + shape_to_string(dW_conv.shape()) +
                         " does not match geometry");

    LinearSystem sys;
    sys.n_unknowns = g.input_count();
    sys.rows.reserve(k2 * g.in_channels * g.filters);

    const std::size_t h2 = g.in_size * g.in_size;
    for (std::size_t d = 0; d < g.filters; ++d) {
        for (std::size_t n = 0; n < g.in_channels; ++n) {
            for (std::size_t k = 0; k < k2; ++k) {
                LinearSystem::Row row;
                row.rhs = dW_conv[(d * g.in_channels + n) * k2 + k];
                row.coeffs.reserve(maps.kernel_to_outputs[k].size());
                for (const auto& hit : maps.kernel_to_outputs[k]) {
                    const double c = dO[d * out * out + hit.out];
                    if (c == 0.0) continue;
                    row.coeffs.push_back({static_cast<std::uint32_t>(n * h2 + hit.in), c});
                }
                sys.rows.push_back(std::move(row));
            }
        }
    }
    return sys;
}

LinearSystem build_weight_constraints(const Tensor& O, const std::vector<std::uint8_t>& known,
                                      const Tensor& weights, const Tensor* bias,
                                      const ContributionMaps& maps) {
    const ConvGeometry& g = maps.geom;
    const std::size_t out = g.out_size();
    const std::size_t k2 = g.kernel * g.kernel;
    if (O.shape() != Shape{g.filters, out, out})
        throw ShapeError("output shape " + shape_to_string(O.shape()) +
                         " does not match geometry");
    if (known.size() != O.size())
        throw ShapeError("known mask has " + std::to_string(known.size()) + " entries for " +
                         std::to_string(O.size()) + " outputs");
    if (weights.shape() != Shape{g.filters, g.in_channels, g.kernel, g.kernel})
        throw ShapeError("weights shape " + shape_to_string(weights.shape()) +
                         " does not match geometry");

    LinearSystem sys;
    sys.n_unknowns = g.input_count();

    const std::size_t h2 = g.in_size * g.in_size;
    for (std::size_t f = 0; f < g.filters; ++f) {
        for (std::size_t o = 0; o < out * out; ++o) {
            if (!known[f * out * out + o]) continue;
            LinearSystem::Row row;
            row.rhs = O[f * out * out + o] - (bias ? (*bias)[f] : 0.0);
            row.coeffs.reserve(maps.output_to_inputs[o].size() * g.in_channels);
            for (std::size_t n = 0; n < g.in_channels; ++n) {
                for (const auto& hit : maps.output_to_inputs[o]) {
                    const double w = weights[(f * g.in_channels + n) * k2 + hit.ker];
                    if (w == 0.0) continue;
                    row.coeffs.push_back({static_cast<std::uint32_t>(n * h2 + hit.in), w});
                }
            }
            sys.rows.push_back(std::move(row));
        }
    }
    return sys;
}

Tensor conv_input_gradient(const Tensor& dO, const Tensor& weights, const ContributionMaps& maps) {
    const ConvGeometry& g = maps.geom;
    const std::size_t out = g.out_size();
    const std::size_t k2 = g.kernel * g.kernel;
    if (dO.shape() != Shape{g.filters, out, out})
        throw ShapeError("output gradient shape " + shape_to_string(dO.shape()) +
                         " does not match geometry");
    if (weights.shape() != Shape{g.filters, g.in_channels, g.kernel, g.kernel})
        throw ShapeError("weights shape " + shape_to_string(weights.shape()) +
                         " does not match geometry");

    Tensor dX({g.in_channels, g.in_size, g.in_size});
    const std::size_t h2 = g.in_size * g.in_size;
    for (std::size_t f = 0; f < g.filters; ++f) {
        for (std::size_t n = 0; n < g.in_channels; ++n) {
            for (std::size_t in = 0; in < h2; ++in) {
                double acc = 0.0;
                for (const auto& hit : maps.input_to_outputs[in])
                    acc += dO[f * out * out + hit.out] *
                           weights[(f * g.in_channels + n) * k2 + hit.ker];
                dX[n * h2 + in] += acc;
            }
        }
    }
    return dX;
}

LayerSolveState solve_layer_input(const LinearSystem& gradient_rows,
                                  const LinearSystem& weight_rows, const ConvGeometry& geom,
                                  double rank_eps) {
    LinearSystem stacked = weight_rows;
    stacked.append(gradient_rows);
    if (stacked.rows.empty()) throw RankDeficientError(0, stacked.n_unknowns);

    LeastSquaresResult ls = solve_least_squares(stacked, rank_eps);
    if (ls.rank < stacked.n_unknowns) throw RankDeficientError(ls.rank, stacked.n_unknowns);

    LayerSolveState state;
    state.X = Tensor({geom.in_channels, geom.in_size, geom.in_size}, std::move(ls.x));
    state.known_mask.assign(state.X.size(), 1);
    state.diagnostics.layer_type = "conv";
    state.diagnostics.n_weight_constraints = weight_rows.n_rows();
    state.diagnostics.n_gradient_constraints = gradient_rows.n_rows();
    state.diagnostics.n_unknowns = stacked.n_unknowns;
    state.diagnostics.matrix_rank = ls.rank;
    state.diagnostics.residual_norm = ls.residual;
    return state;
}

namespace {

// One (conv, activation) block's worth of attack state: the propagated
// output gradient and both constraint families over the conv input.
struct BlockSystems {
    ContributionMaps maps;
    Tensor dO;
    LinearSystem grad_sys;
    LinearSystem weight_sys;
};

BlockSystems build_block(const ArchitectureSpec& arch, const ParameterSet& params,
                         const GradientBundle& grads, std::size_t conv_idx, const Tensor& x,
                         const Tensor& dx, const AttackOptions& opts) {
    const auto& act = std::get<ActivationLayer>(arch.layers[conv_idx + 1]);
    const auto& geom = std::get<ConvLayer>(arch.layers[conv_idx]).geom;
    const ActivationTolerance tol{opts.zero_tol, opts.domain_slack};

    BlockSystems block;
    block.maps = build_contribution_maps(geom);
    block.dO = propagate_gradient_through_activation(dx, x, act.kind, act.alpha, tol);
    block.grad_sys = build_gradient_constraints(block.dO, *grads.layers[conv_idx].weights,
                                                block.maps);
    block.weight_sys.n_unknowns = block.grad_sys.n_unknowns;
    if (opts.use_weight_constraints) {
        const InvertedActivation inv =
            invert_activation(x, act.kind, act.alpha, InvertOptions{tol, opts.max_gain});
        const Tensor* bias =
            params.layers[conv_idx].bias ? &*params.layers[conv_idx].bias : nullptr;
        block.weight_sys = build_weight_constraints(inv.pre, inv.known,
                                                    *params.layers[conv_idx].weights, bias,
                                                    block.maps);
    }
    return block;
}

void check_attack_inputs(const ArchitectureSpec& arch, const ParameterSet& params,
                         const GradientBundle& grads) {
    check_parameters(arch, params);
    check_gradients(arch, grads);
    if (!params.arch_hash.empty() && !grads.arch_hash.empty() &&
        params.arch_hash != grads.arch_hash)
        throw Error("parameter hash " + params.arch_hash + " does not match gradient hash " +
                    grads.arch_hash);
    if (arch.layers.size() < 2)
        throw ShapeError("architecture has no flatten+dense tail to attack");
}

// Dense-layer recovery plus the flatten unwind; the starting point of the
// conv recursion. Returns the dense block's solve state through `state`.
std::pair<Tensor, Tensor> recover_dense_stage(const ArchitectureSpec& arch,
                                              const ParameterSet& params,
                                              const GradientBundle& grads,
                                              const AttackOptions& opts,
                                              LayerSolveState* state) {
    const std::size_t dense_idx = arch.layers.size() - 1;
    const std::size_t flatten_idx = dense_idx - 1;
    const Tensor& dW_fc = *grads.layers[dense_idx].weights;
    const Tensor& db_fc = *grads.layers[dense_idx].bias;

    Tensor x = recover_fc_input(dW_fc, db_fc, opts.fc_averaging, opts.div_eps);
    Tensor dx = fc_input_gradient(dW_fc, db_fc, *params.layers[dense_idx].weights);

    if (state) {
        state->X = x;
        state->dX = dx;
        state->known_mask.assign(x.size(), 1);
        state->diagnostics.layer_index = dense_idx;
        state->diagnostics.layer_type = "dense";
        state->diagnostics.n_unknowns = x.size();
        state->diagnostics.matrix_rank = x.size();
    }

    const Shape conv_out_shape = arch.layer_shapes()[flatten_idx];
    return {x.reshaped(conv_out_shape), dx.reshaped(conv_out_shape)};
}

}  // namespace

ReconstructionReport run_attack(const ArchitectureSpec& arch, const ParameterSet& params,
                                const GradientBundle& grads, const AttackOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    check_attack_inputs(arch, params, grads);

    ReconstructionReport report;
    report.layers.emplace_back();
    auto [x, dx] = recover_dense_stage(arch, params, grads, opts, &report.layers.back());

    // Walk the (conv, activation) blocks from the flatten back to the input.
    const std::size_t flatten_idx = arch.layers.size() - 2;
    for (std::size_t conv_idx = flatten_idx; conv_idx >= 2;) {
        conv_idx -= 2;
        const auto& geom = std::get<ConvLayer>(arch.layers[conv_idx]).geom;
        const Tensor& weights = *params.layers[conv_idx].weights;

        BlockSystems block = build_block(arch, params, grads, conv_idx, x, dx, opts);

        LayerSolveState state;
        try {
            state = solve_layer_input(block.grad_sys, block.weight_sys, geom, opts.rank_eps);
        } catch (const RankDeficientError& e) {
            throw RankDeficientError(e.rank, e.unknowns, static_cast<int>(conv_idx));
        }
        state.dX = conv_input_gradient(block.dO, weights, block.maps);
        state.diagnostics.layer_index = conv_idx;

        x = state.X;
        dx = state.dX;
        report.layers.push_back(std::move(state));
    }

    // States were collected output-to-input; report them in network order.
    std::reverse(report.layers.begin(), report.layers.end());
    report.input = std::move(x);

    const auto t1 = std::chrono::steady_clock::now();
    report.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();
    return report;
}

LinearSystem assemble_layer_system(const ArchitectureSpec& arch, const ParameterSet& params,
                                   const GradientBundle& grads, std::size_t conv_idx,
                                   const AttackOptions& opts) {
    check_attack_inputs(arch, params, grads);
    if (conv_idx >= arch.layers.size() || !std::holds_alternative<ConvLayer>(arch.layers[conv_idx]))
        throw ShapeError("layer " + std::to_string(conv_idx) + " is not a conv layer");

    auto [x, dx] = recover_dense_stage(arch, params, grads, opts, nullptr);

    const std::size_t flatten_idx = arch.layers.size() - 2;
    for (std::size_t ci = flatten_idx; ci >= 2;) {
        ci -= 2;
        const auto& geom = std::get<ConvLayer>(arch.layers[ci]).geom;
        BlockSystems block = build_block(arch, params, grads, ci, x, dx, opts);

        if (ci == conv_idx) {
            LinearSystem stacked = std::move(block.weight_sys);
            stacked.append(block.grad_sys);
            return stacked;
        }

        LayerSolveState state;
        try {
            state = solve_layer_input(block.grad_sys, block.weight_sys, geom, opts.rank_eps);
        } catch (const RankDeficientError& e) {
            throw RankDeficientError(e.rank, e.unknowns, static_cast<int>(ci));
        }
        x = state.X;
        dx = conv_input_gradient(block.dO, *params.layers[ci].weights, block.maps);
    }
    throw ShapeError("conv layer " + std::to_string(conv_idx) + " was not reached");
}

}  // namespace gradleak
