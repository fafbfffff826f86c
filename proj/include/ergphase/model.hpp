#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ergphase/errors.hpp"
#include "ergphase/solve.hpp"
#include "ergphase/tolerances.hpp"

namespace ergphase {

// Exponent pair (p, q) of the two interaction terms; the linear edge term is
// implicit.  Valid models satisfy 2 <= p < q <= 5p-1, which keeps the scalar
// objective's derivative structure simple enough that it has at most two
// local maximizers.
struct ModelSpec {
    int p = 2;
    int q = 3;
    // Diagnostics fixed at construction: the discriminant
    // q^2 + 2(1-3p)q + (p+1)^2 and the interval (3p-1) -+ 2*sqrt(2p(p-1))
    // inside which q must lie for the discriminant to stay nonpositive.
    double discriminant = 0.0;
    double q_interval_low = 0.0;
    double q_interval_high = 0.0;
    // False for specs built by calculus_spec, which skips the ordering
    // requirement.  Phase-geometry operations demand an ordered spec.
    bool ordered = true;
};

namespace detail {

inline void fill_diagnostics(ModelSpec& s) {
    const int p = s.p, q = s.q;
    const double spread = 2.0 * std::sqrt(2.0 * p * (p - 1.0));
    s.discriminant = double(q) * q + 2.0 * (1.0 - 3.0 * p) * q + double(p + 1) * (p + 1);
    s.q_interval_low = (3.0 * p - 1.0) - spread;
    s.q_interval_high = (3.0 * p - 1.0) + spread;
}

} // namespace detail

inline ModelSpec validate_spec(int p, int q) {
    if (p < 2 || q < p)
        throw DomainError("validate_spec requires 2 <= p <= q, got p=" +
                          std::to_string(p) + ", q=" + std::to_string(q));
    if (p == q)
        throw DegenerateModel(
            "p = q = " + std::to_string(p) +
            " collapses the model to two parameters: both interaction terms share one "
            "exponent, so analyze the pair (beta1, beta2 + beta3) instead");
    if (q > 5 * p - 1)
        throw AssumptionViolation("q = " + std::to_string(q) +
                                  " violates q <= 5p-1 = " + std::to_string(5 * p - 1));
    ModelSpec s;
    s.p = p;
    s.q = q;
    s.ordered = true;
    detail::fill_diagnostics(s);
    return s;
}

// Evaluation-only spec that permits a reversed exponent pair (and p = q).
// Exists so the exchange symmetry of the objective under swapping the two
// interaction terms can be checked; rejected by phase-geometry operations.
inline ModelSpec calculus_spec(int p, int q) {
    if (p < 2 || q < 2)
        throw DomainError("calculus_spec requires both exponents >= 2");
    ModelSpec s;
    s.p = p;
    s.q = q;
    s.ordered = false;
    detail::fill_diagnostics(s);
    return s;
}

struct BetaPoint {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
};

namespace detail {

inline void require_finite(const BetaPoint& b) {
    if (!(std::isfinite(b.beta1) && std::isfinite(b.beta2) && std::isfinite(b.beta3)))
        throw DomainError("coupling triple must be finite");
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

} // namespace detail

// The scalar objective whose maximizers drive the whole phase diagram:
//   beta1*u + beta2*u^p + beta3*u^q + entropy(u),
// with entropy(u) = -(u log u + (1-u) log(1-u))/2 and the 0 log 0 = 0
// convention.  order selects the derivative (0 through 3).  At u = 0 and
// u = 1 derivative orders return the signed infinities the entropy term
// dictates, so callers can reason about endpoint behavior without special
// cases of their own.
inline double objective(double u, const BetaPoint& beta, const ModelSpec& spec, int order = 0) {
    if (order < 0 || order > 3)
        throw DomainError("derivative order must be 0, 1, 2, or 3");
    if (!(u >= 0.0 && u <= 1.0))
        throw DomainError("u outside [0, 1]");
    detail::require_finite(beta);

    // Interaction terms accumulate in increasing exponent order so a model
    // with swapped exponents and swapped couplings produces the identical
    // floating-point value.
    const bool p_first = spec.p <= spec.q;
    const int e_lo = p_first ? spec.p : spec.q;
    const int e_hi = p_first ? spec.q : spec.p;
    const double c_lo = p_first ? beta.beta2 : beta.beta3;
    const double c_hi = p_first ? beta.beta3 : beta.beta2;

    const double inf = std::numeric_limits<double>::infinity();

    switch (order) {
    case 0: {
        double acc = beta.beta1 * u;
        acc += c_lo * detail::ipow(u, e_lo);
        acc += c_hi * detail::ipow(u, e_hi);
        acc -= 0.5 * (detail::xlogx(u) + detail::xlogx(1.0 - u));
        return acc;
    }
    case 1: {
        if (u == 0.0) return inf;
        if (u == 1.0) return -inf;
        double acc = beta.beta1;
        acc += c_lo * e_lo * detail::ipow(u, e_lo - 1);
        acc += c_hi * e_hi * detail::ipow(u, e_hi - 1);
        acc -= 0.5 * std::log(u / (1.0 - u));
        return acc;
    }
    case 2: {
        if (u == 0.0 || u == 1.0) return -inf;
        double acc = 0.0;
        acc += c_lo * (e_lo * (e_lo - 1)) * detail::ipow(u, e_lo - 2);
        acc += c_hi * (e_hi * (e_hi - 1)) * detail::ipow(u, e_hi - 2);
        acc -= 0.5 / (u * (1.0 - u));
        return acc;
    }
    default: {
        if (u == 0.0) return inf;
        if (u == 1.0) return -inf;
        double acc = 0.0;
        // Exponent-2 terms have a vanishing cubic coefficient; skipping them
        // also avoids forming u^(-1).
        if (e_lo > 2) acc += c_lo * (e_lo * (e_lo - 1) * (e_lo - 2)) * detail::ipow(u, e_lo - 3);
        if (e_hi > 2) acc += c_hi * (e_hi * (e_hi - 1) * (e_hi - 2)) * detail::ipow(u, e_hi - 3);
        const double v = 1.0 - u;
        acc += (1.0 - 2.0 * u) / (2.0 * u * u * v * v);
        return acc;
    }
    }
}

struct LocalMaximizer {
    double u = 0.0;
    double value = 0.0;
    double second_derivative = 0.0;
};

struct MaximizerSet {
    std::vector<LocalMaximizer> locals;  // sorted by increasing u
    std::vector<std::size_t> globals;    // indices of the value-tied top entries
};

// Locates every local maximizer of the objective.  A uniform scan brackets
// the sign changes of the first derivative; each downward crossing (slope
// positive then negative) is polished by bisection.  Selecting downward
// crossings rather than testing the second derivative at the root keeps the
// degenerate critical corner, where the second derivative vanishes, in the
// result set.  The slope is +inf at 0 and -inf at 1, so when the scan sees
// no crossing near an end the maximizer hides between the endpoint and the
// scan margin; those two fallback brackets are searched too, the left one
// with geometric midpoints because that root can sit at exp(2*beta1).
inline MaximizerSet find_maximizers(const BetaPoint& beta, const ModelSpec& spec,
                                    const ToleranceConfig& tol = {}) {
    detail::require_finite(beta);
    const auto slope = [&](double u) { return objective(u, beta, spec, 1); };

    const int n = std::max(tol.grid_points, 8);
    const double lo_edge = tol.grid_margin;
    const double hi_edge = 1.0 - tol.grid_margin;
    const double step = (hi_edge - lo_edge) / (n - 1);

    struct Bracket {
        double lo, hi, f_lo;
        bool downward;
        bool geometric;
    };
    std::vector<Bracket> brackets;

    double prev_u = lo_edge;
    double prev_d = slope(prev_u);
    const double first_d = prev_d;
    for (int i = 1; i < n; ++i) {
        const double u = (i == n - 1) ? hi_edge : lo_edge + step * i;
        const double d = slope(u);
        if (prev_d > 0.0 && d <= 0.0)
            brackets.push_back({prev_u, u, prev_d, true, false});
        else if (prev_d < 0.0 && d >= 0.0)
            brackets.push_back({prev_u, u, prev_d, false, false});
        prev_u = u;
        prev_d = d;
    }
    const double last_d = prev_d;

    if (first_d < 0.0) {
        // Slope already negative at the left margin: a maximizer lies in
        // (0, margin).  The slope is positive at any representable u > 0
        // at desk scale, so bracket from the smallest normal double.
        const double lo = std::numeric_limits<double>::min();
        const double f_lo = slope(lo);
        if (f_lo > 0.0)
            brackets.insert(brackets.begin(), {lo, lo_edge, f_lo, true, true});
    }
    if (last_d > 0.0) {
        // Mirrored case at the right margin; slope(1) = -inf closes the sign.
        brackets.push_back({hi_edge, 1.0, last_d, true, false});
    }

    if (brackets.size() > 3)
        throw NumericalFailure("bracketed " + std::to_string(brackets.size()) +
                               " stationary points, more than the structure allows; "
                               "tolerance misconfiguration suspected");

    MaximizerSet out;
    for (const Bracket& br : brackets) {
        if (!br.downward) continue;  // minima only participate in the count
        BisectSpec bs;
        bs.interval_abs = br.geometric ? 0.0 : tol.root_interval;
        bs.interval_rel = br.geometric ? tol.root_interval : 0.0;
        bs.geometric = br.geometric;
        bs.max_iter = tol.max_bisect_iter;
        const double u = bisect(slope, br.lo, br.hi, br.f_lo, bs);
        LocalMaximizer lm;
        lm.u = u;
        lm.value = objective(u, beta, spec, 0);
        lm.second_derivative = objective(u, beta, spec, 2);
        out.locals.push_back(lm);
    }

    if (out.locals.empty())
        throw NumericalFailure("no maximizer bracketed; the slope scan found no "
                               "downward crossing on (0, 1)");
    std::sort(out.locals.begin(), out.locals.end(),
              [](const LocalMaximizer& a, const LocalMaximizer& b) { return a.u < b.u; });

    double best = out.locals.front().value;
    for (const LocalMaximizer& lm : out.locals) best = std::max(best, lm.value);
    const double tie = tol.tie_rel * (1.0 + std::fabs(best));
    for (std::size_t i = 0; i < out.locals.size(); ++i)
        if (best - out.locals[i].value <= tie) out.globals.push_back(i);
    return out;
}

struct FreeEnergyResult {
    double psi = 0.0;
    MaximizerSet maximizers;
};

// Limiting free energy density by the scalar reduction: the supremum of the
// objective over [0, 1].  The reduction is only established for nonnegative
// interaction couplings.
inline FreeEnergyResult free_energy(const BetaPoint& beta, const ModelSpec& spec,
                                    const ToleranceConfig& tol = {}) {
    if (beta.beta2 < 0.0 || beta.beta3 < 0.0)
        throw HypothesisViolation(
            "free_energy requires beta2 >= 0 and beta3 >= 0; the variational identity "
            "is not available for negative interaction couplings (calculus operations "
            "still are)");
    FreeEnergyResult r;
    r.maximizers = find_maximizers(beta, spec, tol);
    r.psi = r.maximizers.locals[r.maximizers.globals.front()].value;
    return r;
}

} // namespace ergphase
