#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ergphase/errors.hpp"
#include "ergphase/model.hpp"
#include "ergphase/solve.hpp"
#include "ergphase/tolerances.hpp"

namespace ergphase {

// One point of the second-order critical curve, which is also the corner of
// the coexistence region in the (beta1, beta2) plane at its beta3 level.
struct CriticalPoint {
    double u0 = 0.0;
    double beta1_c = 0.0;
    double beta2_c = 0.0;
    double beta3 = 0.0;
};

// The beta2 interval inside which the objective has two local maximizers,
// at fixed (beta1, beta3) with beta1 below the corner value.
struct VRegion {
    double beta1 = 0.0;
    double beta3 = 0.0;
    double lower = 0.0;        // bound traced by the tangency on the high branch
    double upper = 0.0;        // bound traced by the tangency on the low branch
    double branch_low = 0.0;   // tangency abscissa in (0, u0); upper = inflection_beta2 there
    double branch_high = 0.0;  // tangency abscissa in (u0, 1); lower = inflection_beta2 there
    double u1 = 0.0;           // inflection pair at the representative beta2
    double u2 = 0.0;           // (midpoint of the interval)
    CriticalPoint corner;
};

// One point of the first-order transition surface: the unique beta2 at which
// the two local maximizers have equal objective value.
struct SurfacePoint {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double u_low = 0.0;
    double u_high = 0.0;
    std::array<double, 3> jumps{};  // u_high^e - u_low^e for e = 1, p, q
};

struct InflectionPair {
    double u1 = 0.0;
    double u2 = 0.0;
};

namespace detail {

inline void require_ordered(const ModelSpec& spec) {
    if (!spec.ordered)
        throw DomainError("phase-geometry operations need a validated exponent order "
                          "(p < q); build the spec with validate_spec");
}

inline void require_beta3(double beta3) {
    if (!(beta3 >= 0.0) || !std::isfinite(beta3))
        throw DomainError("beta3 must be finite and >= 0 for phase-geometry operations");
}

// beta3 value at which the critical edge density sits at u, from the
// closed-form corner parametrization.  Strictly increasing on [(p-1)/p, 1).
inline double corner_beta3(double u, const ModelSpec& s) {
    const double v = 1.0 - u;
    return (s.p * u - (s.p - 1)) /
           (2.0 * s.q * (s.q - 1) * (s.q - s.p) * ipow(u, s.q - 1) * v * v);
}

inline double corner_beta2(double u, const ModelSpec& s) {
    const double v = 1.0 - u;
    return (s.q * u - (s.q - 1)) /
           (2.0 * s.p * (s.p - 1) * (s.p - s.q) * ipow(u, s.p - 1) * v * v);
}

inline double corner_beta1(double u, const ModelSpec& s) {
    const double v = 1.0 - u;
    return 0.5 * std::log(u / v) - 1.0 / (2.0 * (s.p - 1) * v) +
           (s.p * u - (s.p - 1)) / (2.0 * (s.p - 1) * (s.q - 1) * v * v);
}

// beta2 that places an inflection of the objective at u, given the corner
// density u0 of the operating beta3 level.  Decreasing below u0, increasing
// above, with minimum value corner_beta2(u0).
inline double inflection_beta2(double u, double u0, const ModelSpec& s) {
    const double v0 = 1.0 - u0;
    const double coeff =
        ((s.p - 1) - s.p * u0) /
        (2.0 * s.p * (s.p - 1) * (s.q - s.p) * ipow(u0, s.q - 1) * v0 * v0);
    return 1.0 / (2.0 * s.p * (s.p - 1) * ipow(u, s.p - 1) * (1.0 - u)) +
           coeff * ipow(u, s.q - s.p);
}

// With beta2 = inflection_beta2(u), the objective slope at u equals
// beta1 + slope_offset(u).  The fold abscissas therefore solve
// slope_offset(u) = -beta1; the function decreases on (0, u0) and increases
// on (u0, 1), diverging at both ends.
inline double slope_offset(double u, double u0, const ModelSpec& s) {
    const double v0 = 1.0 - u0;
    const double coeff = ((s.p - 1) - s.p * u0) /
                         (2.0 * (s.p - 1) * (s.q - 1) * ipow(u0, s.q - 1) * v0 * v0);
    return 1.0 / (2.0 * (s.p - 1) * (1.0 - u)) - 0.5 * std::log(u / (1.0 - u)) +
           coeff * ipow(u, s.q - 1);
}

// Sum of absolute term magnitudes of the objective derivative, used to scale
// residual checks so they stay meaningful when the couplings are large.
inline double term_scale(double u, const BetaPoint& b, const ModelSpec& s, int order) {
    const double v = 1.0 - u;
    const int p = s.p, q = s.q;
    switch (order) {
    case 1:
        return std::fabs(b.beta1) + std::fabs(b.beta2) * p * ipow(u, p - 1) +
               std::fabs(b.beta3) * q * ipow(u, q - 1) + std::fabs(0.5 * std::log(u / v));
    case 2:
        return std::fabs(b.beta2) * p * (p - 1) * ipow(u, p - 2) +
               std::fabs(b.beta3) * q * (q - 1) * ipow(u, q - 2) + 0.5 / (u * v);
    default:
        return (p > 2 ? std::fabs(b.beta2) * p * (p - 1) * (p - 2) * ipow(u, p - 3) : 0.0) +
               (q > 2 ? std::fabs(b.beta3) * q * (q - 1) * (q - 2) * ipow(u, q - 3) : 0.0) +
               std::fabs(1.0 - 2.0 * u) / (2.0 * u * u * v * v);
    }
}

} // namespace detail

// Inverts the corner parametrization: the unique u0 in [(p-1)/p, 1) with
// corner_beta3(u0) = beta3, by bisection on the monotone closed form.
inline double u0_from_beta3(double beta3, const ModelSpec& spec,
                            const ToleranceConfig& tol = {}) {
    detail::require_ordered(spec);
    detail::require_beta3(beta3);
    const double lo = (spec.p - 1.0) / spec.p;
    if (beta3 == 0.0) return lo;

    const double hi = std::nextafter(1.0, 0.0);
    if (detail::corner_beta3(hi, spec) < beta3)
        throw NumericalFailure("beta3 too large: the corner density is not resolvable "
                               "below 1 in double precision");
    const auto f = [&](double u) { return detail::corner_beta3(u, spec) - beta3; };
    BisectSpec bs;
    bs.interval_abs = tol.root_interval;
    bs.max_iter = tol.max_bisect_iter;
    return bisect(f, lo, hi, -beta3, bs);
}

// Corner of the coexistence region at the given beta3 level.  The returned
// point is certified: all three objective derivatives must vanish there
// within a residual bound scaled to the coupling magnitudes.
inline CriticalPoint corner_point(double beta3, const ModelSpec& spec,
                                  const ToleranceConfig& tol = {}) {
    const double u0 = u0_from_beta3(beta3, spec, tol);
    CriticalPoint cp;
    cp.u0 = u0;
    cp.beta1_c = detail::corner_beta1(u0, spec);
    cp.beta2_c = detail::corner_beta2(u0, spec);
    cp.beta3 = beta3;

    const BetaPoint at{cp.beta1_c, cp.beta2_c, cp.beta3};
    for (int order = 1; order <= 3; ++order) {
        const double res = std::fabs(objective(u0, at, spec, order));
        const double scale = 1.0 + detail::term_scale(u0, at, spec, order);
        if (!(res <= tol.triple_root_residual * scale))
            throw NumericalFailure("corner_point: derivative order " + std::to_string(order) +
                                   " does not vanish at the corner within tolerance");
    }
    return cp;
}

// The critical curve, sampled uniformly in the corner density over the range
// where all three couplings stay nonnegative.  At the left end beta3 = 0, at
// the right end beta2 = 0, both up to rounding of the endpoint density.
inline std::vector<CriticalPoint> critical_curve(const ModelSpec& spec, int n_samples,
                                                 const ToleranceConfig& tol = {}) {
    (void)tol;
    detail::require_ordered(spec);
    if (n_samples < 2) throw DomainError("critical_curve needs n_samples >= 2");
    const double u_lo = (spec.p - 1.0) / spec.p;
    const double u_hi = (spec.q - 1.0) / spec.q;
    std::vector<CriticalPoint> out;
    out.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double u = (i == n_samples - 1)
                             ? u_hi
                             : u_lo + (u_hi - u_lo) * i / (n_samples - 1);
        out.push_back({u, detail::corner_beta1(u, spec), detail::corner_beta2(u, spec),
                       detail::corner_beta3(u, spec)});
    }
    return out;
}

namespace detail {

// The two roots of inflection_beta2(u) = beta2, one on each side of u0.
// Requires beta2 strictly above the corner value.  The outward bracket
// searches clamp at the representable limits near 0 and 1, where the root
// may fall below resolvable spacing for extreme beta2.
inline InflectionPair inflection_roots(double beta2, double u0, const ModelSpec& spec,
                                       const ToleranceConfig& tol) {
    const auto f = [&](double u) { return inflection_beta2(u, u0, spec) - beta2; };

    BisectSpec geo;
    geo.interval_abs = tol.root_interval;
    geo.interval_rel = tol.root_interval;
    geo.geometric = true;
    geo.max_iter = tol.max_bisect_iter;

    double hi_b = u0;
    double x = 0.5 * u0;
    int guard = 0;
    while (f(x) <= 0.0) {
        hi_b = x;
        x *= 0.5;
        if (++guard > 2000 || x < std::numeric_limits<double>::min())
            throw NumericalFailure("inflection bracket search ran off the left end");
    }
    const double u1 = bisect(f, x, hi_b, f(x), geo);

    BisectSpec ari;
    ari.interval_abs = tol.root_interval;
    ari.max_iter = tol.max_bisect_iter;

    double lo_b = u0;
    double y = 1.0 - 0.5 * (1.0 - u0);
    guard = 0;
    double u2;
    for (;;) {
        const double fy = f(y);
        if (fy > 0.0) {
            u2 = bisect(f, lo_b, y, f(lo_b), ari);
            break;
        }
        lo_b = y;
        const double next = 1.0 - 0.5 * (1.0 - y);
        if (!(next > y) || ++guard > 2000) {
            u2 = y;  // root closer to 1 than doubles resolve
            break;
        }
        y = next;
    }
    return {u1, u2};
}

// Both local maximizers of the objective for a beta2 strictly inside the
// coexistence interval, split by the inflection pair: the slope decreases
// on (0, u1) and on (u2, 1), so each piece holds exactly one downward root.
inline std::pair<double, double> coexisting_maximizers(double beta1, double beta2,
                                                       double beta3, double u0,
                                                       const ModelSpec& spec,
                                                       const ToleranceConfig& tol) {
    const BetaPoint b{beta1, beta2, beta3};
    const auto dl = [&](double u) { return objective(u, b, spec, 1); };
    const InflectionPair infl = inflection_roots(beta2, u0, spec, tol);

    double u_low;
    if (dl(infl.u1) >= 0.0) {
        u_low = infl.u1;  // tangency collapse at the bracket edge
    } else {
        double hi_b = infl.u1;
        double x = 0.5 * infl.u1;
        int guard = 0;
        while (dl(x) <= 0.0) {
            hi_b = x;
            x *= 0.5;
            if (++guard > 2000 || x < std::numeric_limits<double>::min())
                throw NumericalFailure("low-branch maximizer bracket ran off the left end");
        }
        BisectSpec geo;
        geo.interval_abs = tol.root_interval;
        geo.interval_rel = tol.root_interval;
        geo.geometric = true;
        geo.max_iter = tol.max_bisect_iter;
        u_low = bisect(dl, x, hi_b, dl(x), geo);
    }

    double u_high;
    const double d2 = dl(infl.u2);
    if (d2 <= 0.0) {
        u_high = infl.u2;
    } else {
        BisectSpec ari;
        ari.interval_abs = tol.root_interval;
        ari.max_iter = tol.max_bisect_iter;
        u_high = bisect(dl, infl.u2, 1.0, d2, ari);
    }
    return {u_low, u_high};
}

} // namespace detail

// The inflection pair of the objective at the given couplings, if any:
// two roots straddling u0 when beta2 is above the corner value, the merged
// degenerate root exactly at it, nothing below.
inline std::optional<InflectionPair> inflection_points(double beta2, double beta3,
                                                       const ModelSpec& spec,
                                                       const ToleranceConfig& tol = {}) {
    detail::require_ordered(spec);
    detail::require_beta3(beta3);
    if (!std::isfinite(beta2)) throw DomainError("beta2 must be finite");
    const double u0 = u0_from_beta3(beta3, spec, tol);
    const double b2c = detail::corner_beta2(u0, spec);
    if (beta2 == b2c) return InflectionPair{u0, u0};
    if (beta2 < b2c) return std::nullopt;
    return detail::inflection_roots(beta2, u0, spec, tol);
}

// Coexistence interval in beta2 at fixed (beta1, beta3); empty at and above
// the corner value of beta1.  Each bound is the inflection coupling at the
// fold abscissa on its branch, found by bisection of the monotone
// slope_offset pieces.
inline std::optional<VRegion> v_region(double beta1, double beta3, const ModelSpec& spec,
                                       const ToleranceConfig& tol = {}) {
    detail::require_ordered(spec);
    detail::require_beta3(beta3);
    if (!std::isfinite(beta1)) throw DomainError("beta1 must be finite");

    const CriticalPoint corner = corner_point(beta3, spec, tol);
    if (beta1 >= corner.beta1_c) return std::nullopt;
    const double u0 = corner.u0;

    const auto g = [&](double u) { return detail::slope_offset(u, u0, spec) + beta1; };

    double hi_b = u0;
    double x = 0.5 * u0;
    int guard = 0;
    while (g(x) <= 0.0) {
        hi_b = x;
        x *= 0.5;
        if (++guard > 2000 || x < std::numeric_limits<double>::min())
            throw NumericalFailure("fold bracket search ran off the left end");
    }
    BisectSpec geo;
    geo.interval_abs = tol.root_interval;
    geo.interval_rel = tol.root_interval;
    geo.geometric = true;
    geo.max_iter = tol.max_bisect_iter;
    const double a = bisect(g, x, hi_b, g(x), geo);

    BisectSpec ari;
    ari.interval_abs = tol.root_interval;
    ari.max_iter = tol.max_bisect_iter;
    double lo_b = u0;
    double y = 1.0 - 0.5 * (1.0 - u0);
    guard = 0;
    double b;
    for (;;) {
        const double gy = g(y);
        if (gy > 0.0) {
            b = bisect(g, lo_b, y, g(lo_b), ari);
            break;
        }
        lo_b = y;
        const double next = 1.0 - 0.5 * (1.0 - y);
        if (!(next > y) || ++guard > 2000) {
            b = y;
            break;
        }
        y = next;
    }

    VRegion vr;
    vr.beta1 = beta1;
    vr.beta3 = beta3;
    vr.branch_low = a;
    vr.branch_high = b;
    vr.upper = detail::inflection_beta2(a, u0, spec);
    vr.lower = detail::inflection_beta2(b, u0, spec);
    vr.corner = corner;
    const InflectionPair rep =
        detail::inflection_roots(0.5 * (vr.lower + vr.upper), u0, spec, tol);
    vr.u1 = rep.u1;
    vr.u2 = rep.u2;
    return vr;
}

// The transition value of beta2 at fixed (beta1, beta3): the unique point of
// the coexistence interval where the two maximizers tie.  Bisection on the
// value difference, which increases in beta2.  The initial bracket stands a
// hair inside the interval ends, where one maximizer degenerates to an
// inflection; the inset shrinks adaptively because the prescribed fraction
// of the width overshoots the root when the interval spans many decades.
inline std::optional<SurfacePoint> transition_beta2(double beta1, double beta3,
                                                    const ModelSpec& spec,
                                                    const ToleranceConfig& tol = {}) {
    const std::optional<VRegion> vr = v_region(beta1, beta3, spec, tol);
    if (!vr) return std::nullopt;
    const double u0 = vr->corner.u0;
    const double width = vr->upper - vr->lower;

    SurfacePoint sp;
    sp.beta1 = beta1;
    sp.beta3 = beta3;

    const auto value_gap = [&](double b2, std::pair<double, double>& us) {
        us = detail::coexisting_maximizers(beta1, b2, beta3, u0, spec, tol);
        const BetaPoint b{beta1, b2, beta3};
        return objective(us.second, b, spec, 0) - objective(us.first, b, spec, 0);
    };

    std::pair<double, double> us{u0, u0};
    if (!(width > 4.0 * tol.root_interval * (1.0 + std::fabs(vr->lower)))) {
        // Degenerate sliver just below the corner: report the midpoint.
        sp.beta2 = vr->lower + 0.5 * width;
        const MaximizerSet ms = find_maximizers({beta1, sp.beta2, beta3}, spec, tol);
        sp.u_low = ms.locals.front().u;
        sp.u_high = ms.locals.back().u;
    } else {
        double eps = 1e-9 * width;
        double lo = vr->lower + eps;
        double g_lo = value_gap(lo, us);
        for (int tries = 0; g_lo >= 0.0 && tries < 60; ++tries) {
            eps /= 16.0;
            lo = vr->lower + eps;
            g_lo = value_gap(lo, us);
        }
        eps = 1e-9 * width;
        double hi = vr->upper - eps;
        double g_hi = value_gap(hi, us);
        for (int tries = 0; g_hi <= 0.0 && tries < 60; ++tries) {
            eps /= 16.0;
            hi = vr->upper - eps;
            g_hi = value_gap(hi, us);
        }
        if (!(g_lo < 0.0 && g_hi > 0.0))
            throw NumericalFailure("transition_beta2: value difference does not straddle "
                                   "zero at the bracket ends");

        double r = lo;
        for (int it = 0; it < 2 * tol.max_bisect_iter; ++it) {
            if (hi > 1e3 * std::fabs(lo) && lo > 0.0)
                r = std::exp(0.5 * (std::log(lo) + std::log(hi)));
            else
                r = 0.5 * (lo + hi);
            if (!(r > lo && r < hi)) break;
            const double gap = value_gap(r, us);
            const BetaPoint b{beta1, r, beta3};
            const double level = std::fabs(objective(us.first, b, spec, 0));
            if (std::fabs(gap) <= tol.tie_rel * (1.0 + level)) break;
            if (hi - lo <= tol.root_interval * std::max(1.0, std::fabs(r))) break;
            if (gap < 0.0)
                lo = r;
            else
                hi = r;
        }
        sp.beta2 = r;
        sp.u_low = us.first;
        sp.u_high = us.second;
    }

    sp.jumps = {sp.u_high - sp.u_low,
                detail::ipow(sp.u_high, spec.p) - detail::ipow(sp.u_low, spec.p),
                detail::ipow(sp.u_high, spec.q) - detail::ipow(sp.u_low, spec.q)};
    return sp;
}

struct SurfaceTrace {
    std::vector<SurfacePoint> points;   // sorted by (beta3, beta1)
    std::vector<std::string> notes;     // per-point failures, collected not fatal
};

inline SurfaceTrace trace_surface(std::vector<double> beta3_values,
                                  std::vector<double> beta1_grid, const ModelSpec& spec,
                                  bool constrain_nonneg = false,
                                  const ToleranceConfig& tol = {}) {
    detail::require_ordered(spec);
    std::sort(beta3_values.begin(), beta3_values.end());
    std::sort(beta1_grid.begin(), beta1_grid.end());
    SurfaceTrace out;
    for (double b3 : beta3_values) {
        for (double b1 : beta1_grid) {
            try {
                const std::optional<SurfacePoint> sp = transition_beta2(b1, b3, spec, tol);
                if (!sp) continue;  // at or above the corner, no transition
                if (constrain_nonneg && sp->beta2 < 0.0) continue;
                out.points.push_back(*sp);
            } catch (const Error& e) {
                out.notes.push_back("beta3=" + std::to_string(b3) + " beta1=" +
                                    std::to_string(b1) + ": " + e.kind() + ": " + e.what());
            }
        }
    }
    return out;
}

// Distance from the transition value to the asymptote beta2 = -beta1 - beta3,
// which every model approaches as beta1 goes to minus infinity.
inline double universality_gap(double beta1, double beta3, const ModelSpec& spec,
                               const ToleranceConfig& tol = {}) {
    const std::optional<SurfacePoint> sp = transition_beta2(beta1, beta3, spec, tol);
    if (!sp)
        throw DomainError("universality_gap needs beta1 below the corner value beta1_c");
    return std::fabs(sp->beta2 + beta1 + beta3);
}

enum class PhaseRegion { OffSurface, OnSurface, Critical };

struct PhaseClassification {
    PhaseRegion region = PhaseRegion::OffSurface;
    double u_star = 0.0;   // unique global maximizer (OffSurface), or u0 (Critical)
    double u_low = 0.0;    // coexisting pair (OnSurface)
    double u_high = 0.0;
    double u0 = 0.0;       // corner density (Critical)
    // Transition value at this (beta1, beta3) when one was computed, else NaN.
    double transition = std::numeric_limits<double>::quiet_NaN();
};

// Phase placement of a parameter point: at the corner within the critical
// band, on the transition surface within the surface band, otherwise in the
// single-maximizer bulk.  The corner test runs first so the bands nest.
inline PhaseClassification classify(const BetaPoint& beta, const ModelSpec& spec,
                                    const ToleranceConfig& tol = {}) {
    detail::require_ordered(spec);
    detail::require_finite(beta);
    detail::require_beta3(beta.beta3);

    PhaseClassification pc;
    const CriticalPoint corner = corner_point(beta.beta3, spec, tol);
    const double dist = std::hypot(beta.beta1 - corner.beta1_c, beta.beta2 - corner.beta2_c);
    if (dist <= tol.critical_band) {
        pc.region = PhaseRegion::Critical;
        pc.u0 = corner.u0;
        pc.u_star = corner.u0;
        return pc;
    }
    if (beta.beta1 < corner.beta1_c) {
        const std::optional<SurfacePoint> sp =
            transition_beta2(beta.beta1, beta.beta3, spec, tol);
        if (sp) {
            pc.transition = sp->beta2;
            if (std::fabs(beta.beta2 - sp->beta2) <= tol.on_surface_band) {
                pc.region = PhaseRegion::OnSurface;
                pc.u_low = sp->u_low;
                pc.u_high = sp->u_high;
                return pc;
            }
        }
    }
    pc.region = PhaseRegion::OffSurface;
    const MaximizerSet ms = find_maximizers(beta, spec, tol);
    pc.u_star = ms.locals[ms.globals.front()].u;
    return pc;
}

} // namespace ergphase
