#include "gradleak/activation.hpp"

#include <cmath>
#include <limits>

namespace gradleak {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

[[noreturn]] void domain_error(ActivationKind kind, double x) {
    throw ActivationDomainError(std::string(activation_name(kind)) +
                                " cannot produce output " + std::to_string(x));
}

// Interval of representable outputs. Bounds are open except ReLU's
// zero, which the activation actually attains.
struct Domain {
    double lo;
    double hi;
    bool lo_closed;
};

Domain output_domain(ActivationKind kind, double alpha) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind) {
        case ActivationKind::Sigmoid: return {0.0, 1.0, false};
        case ActivationKind::Tanh: return {-1.0, 1.0, false};
        case ActivationKind::ArcTan: return {-kHalfPi, kHalfPi, false};
        case ActivationKind::SoftPlus: return {0.0, inf, false};
        case ActivationKind::ReLU: return {0.0, inf, true};
        case ActivationKind::LeakyReLU:
        case ActivationKind::PReLU: return {-inf, inf, true};
        case ActivationKind::ELU: return {-alpha, inf, false};
    }
    return {-inf, inf, true};
}

enum class RangeStatus { Interior, Saturated, Invalid };

// Classifies a claimed output value against the activation's range.
// Values outside (or on an open boundary) count as saturated when they
// sit within `slack` of it, invalid beyond that. ReLU widens the valid
// zero to [-zero_tol, zero_tol].
RangeStatus classify_output(double x, ActivationKind kind, double alpha,
                            const ActivationTolerance& tol) {
    const Domain d = output_domain(kind, alpha);
    double lo = d.lo;
    bool lo_closed = d.lo_closed;
    if (kind == ActivationKind::ReLU) lo = -tol.zero_tol;
    const bool below = lo_closed ? x < lo : x <= lo;
    const bool above = x >= d.hi;
    if (!below && !above) return RangeStatus::Interior;
    if (tol.domain_slack > 0.0 && x >= lo - tol.domain_slack &&
        x <= d.hi + tol.domain_slack)
        return RangeStatus::Saturated;
    return RangeStatus::Invalid;
}

// Nearest in-range value, used for saturated entries.
double clamp_output(double x, ActivationKind kind, double alpha) {
    const Domain d = output_domain(kind, alpha);
    return std::min(std::max(x, d.lo), d.hi);
}

}  // namespace

const char* activation_name(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::ArcTan: return "arctan";
        case ActivationKind::SoftPlus: return "softplus";
        case ActivationKind::ReLU: return "relu";
        case ActivationKind::LeakyReLU: return "leaky_relu";
        case ActivationKind::PReLU: return "prelu";
        case ActivationKind::ELU: return "elu";
    }
    return "?";
}

ActivationKind activation_from_name(const std::string& name) {
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "arctan") return ActivationKind::ArcTan;
    if (name == "softplus") return ActivationKind::SoftPlus;
    if (name == "relu") return ActivationKind::ReLU;
    if (name == "leaky_relu") return ActivationKind::LeakyReLU;
    if (name == "prelu") return ActivationKind::PReLU;
    if (name == "elu") return ActivationKind::ELU;
    throw ParseError("unknown activation kind: " + name);
}

bool activation_needs_alpha(ActivationKind kind) {
    return kind == ActivationKind::PReLU || kind == ActivationKind::ELU;
}

Invertibility activation_invertibility(ActivationKind kind) {
    return kind == ActivationKind::ReLU ? Invertibility::Partial : Invertibility::Full;
}

double activation_apply_scalar(double o, ActivationKind kind, double alpha) {
    switch (kind) {
        case ActivationKind::Sigmoid: return 1.0 / (1.0 + std::exp(-o));
        case ActivationKind::Tanh: return std::tanh(o);
        case ActivationKind::ArcTan: return std::atan(o);
        case ActivationKind::SoftPlus: return std::log1p(std::exp(o));
        case ActivationKind::ReLU: return o > 0.0 ? o : 0.0;
        case ActivationKind::LeakyReLU: return o >= 0.0 ? o : kLeakyReluSlope * o;
        case ActivationKind::PReLU: return o >= 0.0 ? o : alpha * o;
        case ActivationKind::ELU: return o >= 0.0 ? o : alpha * std::expm1(o);
    }
    return o;
}

Tensor activation_apply(const Tensor& input, ActivationKind kind, double alpha) {
    Tensor out(input.shape());
    for (std::size_t i = 0; i < input.size(); ++i)
        out[i] = activation_apply_scalar(input[i], kind, alpha);
    return out;
}

namespace {

double output_derivative_scalar(double x, ActivationKind kind, double alpha,
                                const ActivationTolerance& tol) {
    switch (classify_output(x, kind, alpha, tol)) {
        case RangeStatus::Interior: break;
        case RangeStatus::Saturated: x = clamp_output(x, kind, alpha); break;
        case RangeStatus::Invalid: domain_error(kind, x);
    }
    switch (kind) {
        case ActivationKind::Sigmoid: return x * (1.0 - x);
        case ActivationKind::Tanh: return 1.0 - x * x;
        case ActivationKind::ArcTan: {
            const double t = std::tan(x);
            return 1.0 / (1.0 + t * t);
        }
        case ActivationKind::SoftPlus: return 1.0 - std::exp(-x);
        case ActivationKind::ReLU: return x > tol.zero_tol ? 1.0 : 0.0;
        case ActivationKind::LeakyReLU: return x >= 0.0 ? 1.0 : kLeakyReluSlope;
        case ActivationKind::PReLU: return x >= 0.0 ? 1.0 : alpha;
        case ActivationKind::ELU: return x >= 0.0 ? 1.0 : x + alpha;
    }
    return 0.0;
}

}  // namespace

Tensor activation_output_derivative(const Tensor& output, ActivationKind kind,
                                    double alpha, const ActivationTolerance& tol) {
    Tensor d(output.shape());
    for (std::size_t i = 0; i < output.size(); ++i)
        d[i] = output_derivative_scalar(output[i], kind, alpha, tol);
    return d;
}

Tensor activation_input_derivative(const Tensor& input, ActivationKind kind, double alpha) {
    Tensor d(input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double o = input[i];
        switch (kind) {
            case ActivationKind::Sigmoid: {
                const double s = 1.0 / (1.0 + std::exp(-o));
                d[i] = s * (1.0 - s);
                break;
            }
            case ActivationKind::Tanh: {
                const double t = std::tanh(o);
                d[i] = 1.0 - t * t;
                break;
            }
            case ActivationKind::ArcTan:
                d[i] = 1.0 / (1.0 + o * o);
                break;
            case ActivationKind::SoftPlus:
                d[i] = 1.0 / (1.0 + std::exp(-o));
                break;
            case ActivationKind::ReLU:
                d[i] = o > 0.0 ? 1.0 : 0.0;
                break;
            case ActivationKind::LeakyReLU:
                d[i] = o >= 0.0 ? 1.0 : kLeakyReluSlope;
                break;
            case ActivationKind::PReLU:
                d[i] = o >= 0.0 ? 1.0 : alpha;
                break;
            case ActivationKind::ELU:
                d[i] = o >= 0.0 ? 1.0 : alpha * std::exp(o);
                break;
        }
    }
    return d;
}

InvertedActivation invert_activation(const Tensor& output, ActivationKind kind,
                                     double alpha, const InvertOptions& opts) {
    InvertedActivation result;
    result.pre = Tensor(output.shape());
    result.known.assign(output.size(), 0);

    for (std::size_t i = 0; i < output.size(); ++i) {
        const double x = output[i];
        switch (classify_output(x, kind, alpha, opts.tol)) {
            case RangeStatus::Interior: break;
            case RangeStatus::Saturated: continue;  // left unknown
            case RangeStatus::Invalid: domain_error(kind, x);
        }

        double pre = 0.0;
        double gain = 1.0;  // |dO/dX| at this entry
        bool known = true;
        switch (kind) {
            case ActivationKind::Sigmoid:
                gain = 1.0 / (x * (1.0 - x));
                pre = std::log(x / (1.0 - x));
                break;
            case ActivationKind::Tanh:
                gain = 1.0 / (1.0 - x * x);
                pre = std::atanh(x);
                break;
            case ActivationKind::ArcTan: {
                const double t = std::tan(x);
                gain = 1.0 + t * t;
                pre = t;
                break;
            }
            case ActivationKind::SoftPlus:
                gain = 1.0 / (1.0 - std::exp(-x));
                pre = std::log(std::expm1(x));
                break;
            case ActivationKind::ReLU:
                if (x > opts.tol.zero_tol) {
                    pre = x;
                } else {
                    known = false;  // any o <= 0 maps to this output
                }
                break;
            case ActivationKind::LeakyReLU:
                pre = x >= 0.0 ? x : x / kLeakyReluSlope;
                gain = x >= 0.0 ? 1.0 : 1.0 / kLeakyReluSlope;
                break;
            case ActivationKind::PReLU:
                pre = x >= 0.0 ? x : x / alpha;
                gain = x >= 0.0 ? 1.0 : 1.0 / alpha;
                break;
            case ActivationKind::ELU:
                if (x >= 0.0) {
                    pre = x;
                } else {
                    gain = 1.0 / (x + alpha);
                    pre = std::log1p(x / alpha);
                }
                break;
        }
        if (known && opts.max_gain > 0.0 && !(gain <= opts.max_gain)) known = false;
        if (known && !std::isfinite(pre)) known = false;
        if (known) {
            result.pre[i] = pre;
            result.known[i] = 1;
            ++result.known_count;
        }
    }
    return result;
}

}  // namespace gradleak
