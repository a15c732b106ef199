#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradleak/activation.hpp"
#include "gradleak/geometry.hpp"
#include "gradleak/model.hpp"

namespace gradleak {

// Inclusive row-count range. lo == hi when the count does not depend on the
// data (fully invertible activations); ReLU layers only bound it.
struct ConstraintRange {
    std::size_t lo = 0;
    std::size_t hi = 0;
};

// Rows contributed by the leaked weight gradients: one per weight entry,
// K^2 * N * F. This counts actual weights, so it carries the input-channel
// factor that the simplified closed form K^2 * F drops.
std::size_t count_gradient_constraints(const ConvGeometry& geom);

// Rows contributed by known output values: up to one per output element,
// F * outH^2 in total (the spatial term enters squared). Fully invertible
// activations pin the count; partially invertible ones only bound it; a
// non-invertible one would contribute nothing.
ConstraintRange count_weight_constraints(const ConvGeometry& geom, Invertibility inv);
ConstraintRange count_weight_constraints(const ConvGeometry& geom, ActivationKind kind);

enum class Verdict { Vulnerable, Safe, Undetermined };
const char* verdict_name(Verdict v);

struct LayerAudit {
    std::size_t layer_index = 0;
    ConvGeometry geom;
    ActivationKind activation = ActivationKind::ReLU;
    std::size_t n_unknowns = 0;
    std::size_t gradient_constraints = 0;
    ConstraintRange weight_constraints;
    // False when some input position falls under no sliding window (stride
    // larger than kernel); such positions are unrecoverable regardless of
    // counts, so the verdict is forced to safe.
    bool full_coverage = true;
    // vulnerable: enough rows even in the worst case; safe: too few rows
    // even in the best case (or coverage gap); undetermined: depends on
    // which ReLU outputs are active.
    Verdict verdict = Verdict::Undetermined;
    // Smallest filter count for which the gradient rows alone could cover
    // the unknowns: ceil(H^2 / K^2).
    std::size_t min_filters_gradient_only = 0;
    std::optional<std::size_t> empirical_rank;
};

// Counting-only audit of every conv layer.
std::vector<LayerAudit> audit_architecture(const ArchitectureSpec& arch);

// Counting audit plus the measured rank of each layer's actually assembled
// stacked matrix. A counting verdict of vulnerable that the measurement
// contradicts is downgraded to undetermined rather than silently kept.
// Layers the recursion cannot reach (a deeper solve failed) keep an empty
// empirical_rank.
std::vector<LayerAudit> audit_with_empirical(const ArchitectureSpec& arch,
                                             const ParameterSet& params,
                                             const GradientBundle& grads,
                                             double rank_eps = 1e-10);

// Rank of the stacked system the attack would assemble for the given conv
// layer, after solving the layers behind it. Throws when layer_index is not
// a conv layer or a deeper layer cannot be solved.
std::size_t empirical_rank(const ArchitectureSpec& arch, const ParameterSet& params,
                           const GradientBundle& grads, std::size_t layer_index,
                           double rank_eps = 1e-10);

// Aligned-column text table and JSON document carrying the same numbers.
std::string audit_table(const std::vector<LayerAudit>& audits);
std::string audit_json(const std::vector<LayerAudit>& audits);

}  // namespace gradleak
