#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ergphase/errors.hpp"
#include "ergphase/model.hpp"
#include "ergphase/phase.hpp"

namespace ergphase {

using SecondDerivativeMatrix = std::array<std::array<double, 3>, 3>;

// Limiting densities of the three bound subgraph families at maximizer u:
// the gradient of the limiting free energy in the couplings.
inline std::array<double, 3> density_powers(double u, const ModelSpec& spec) {
    return {u, detail::ipow(u, spec.p), detail::ipow(u, spec.q)};
}

struct FirstDerivatives {
    bool coexistent = false;             // true on the transition surface
    std::array<double, 3> branch_low{};  // from the smaller maximizer
    std::array<double, 3> branch_high{}; // equals branch_low off the surface
};

inline FirstDerivatives first_derivatives(const BetaPoint& beta, const ModelSpec& spec,
                                          const ToleranceConfig& tol = {}) {
    if (beta.beta3 < 0.0)
        throw HypothesisViolation("first_derivatives needs beta3 >= 0");
    const PhaseClassification pc = classify(beta, spec, tol);
    FirstDerivatives fd;
    switch (pc.region) {
    case PhaseRegion::OnSurface:
        fd.coexistent = true;
        fd.branch_low = density_powers(pc.u_low, spec);
        fd.branch_high = density_powers(pc.u_high, spec);
        break;
    case PhaseRegion::Critical:
        fd.branch_low = fd.branch_high = density_powers(pc.u0, spec);
        break;
    default:
        fd.branch_low = fd.branch_high = density_powers(pc.u_star, spec);
        break;
    }
    return fd;
}

// Hessian of the limiting free energy in the couplings, valid only off the
// transition set.  All six entries share the factor -1/curvature, making the
// matrix rank one and positive semidefinite at a strict maximum.
inline SecondDerivativeMatrix second_derivatives(const BetaPoint& beta,
                                                 const ModelSpec& spec,
                                                 const ToleranceConfig& tol = {}) {
    if (beta.beta3 < 0.0)
        throw HypothesisViolation("second_derivatives needs beta3 >= 0");
    const PhaseClassification pc = classify(beta, spec, tol);
    if (pc.region == PhaseRegion::OnSurface)
        throw SurfaceError("second derivatives diverge on the transition surface; the "
                           "point lies within the surface band");
    if (pc.region == PhaseRegion::Critical)
        throw SurfaceError("second derivatives diverge along the critical curve; the "
                           "point lies within the critical band");

    const double u = pc.u_star;
    const double curvature = objective(u, beta, spec, 2);
    if (!(curvature < 0.0))
        throw SurfaceError("degenerate curvature at the maximizer; the point is "
                           "numerically on the transition set");
    const double factor = -1.0 / curvature;
    const std::array<double, 3> c = {1.0, spec.p * detail::ipow(u, spec.p - 1),
                                     spec.q * detail::ipow(u, spec.q - 1)};
    SecondDerivativeMatrix m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = c[i] * c[j] * factor;
    return m;
}

inline std::array<double, 3> jump_sizes(const SurfacePoint& point, const ModelSpec& spec) {
    return {point.u_high - point.u_low,
            detail::ipow(point.u_high, spec.p) - detail::ipow(point.u_low, spec.p),
            detail::ipow(point.u_high, spec.q) - detail::ipow(point.u_low, spec.q)};
}

// Everything the observables view of one parameter point offers.  maximizer
// carries the low branch density when the point sits on the surface.
struct ObservableReport {
    PhaseClassification classification;
    FirstDerivatives first;
    bool has_second = false;
    SecondDerivativeMatrix second{};
    double maximizer = 0.0;
};

inline ObservableReport observable_report(const BetaPoint& beta, const ModelSpec& spec,
                                          const ToleranceConfig& tol = {}) {
    ObservableReport rep;
    rep.classification = classify(beta, spec, tol);
    rep.first = first_derivatives(beta, spec, tol);
    rep.maximizer = rep.first.coexistent ? rep.classification.u_low
                                         : rep.classification.u_star;
    if (rep.classification.region == PhaseRegion::OffSurface) {
        rep.second = second_derivatives(beta, spec, tol);
        rep.has_second = true;
    }
    return rep;
}

// Second-derivative growth along a geometric approach to a corner, walking
// beta2 up to the corner value from below at fixed beta1 = beta1_c.  The
// fitted log-log slope is informational; the theory asserts divergence but
// no rate.
struct DivergenceProbe {
    std::vector<double> distances;  // Euclidean distance to the corner, here |beta2 - beta2_c|
    std::vector<double> entries;    // Hessian entry (1,1)
    double slope = 0.0;             // least-squares slope of log entry vs log distance
};

inline DivergenceProbe divergence_probe(const CriticalPoint& corner, const ModelSpec& spec,
                                        double t0, double ratio, int count,
                                        const ToleranceConfig& tol = {}) {
    if (!(t0 > 0.0) || !(ratio > 0.0 && ratio < 1.0) || count < 2)
        throw DomainError("divergence_probe needs t0 > 0, ratio in (0,1), count >= 2");
    if (corner.beta2_c - t0 < 0.0)
        throw DomainError("divergence_probe path starts outside the admissible region; "
                          "pick a corner with beta2_c above t0");
    DivergenceProbe probe;
    double t = t0;
    for (int k = 0; k < count; ++k, t *= ratio) {
        const BetaPoint beta{corner.beta1_c, corner.beta2_c - t, corner.beta3};
        const SecondDerivativeMatrix m = second_derivatives(beta, spec, tol);
        probe.distances.push_back(t);
        probe.entries.push_back(m[0][0]);
    }
    const int n = count;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += std::log(probe.distances[i]);
        my += std::log(probe.entries[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = std::log(probe.distances[i]) - mx;
        sxy += dx * (std::log(probe.entries[i]) - my);
        sxx += dx * dx;
    }
    probe.slope = sxy / sxx;
    return probe;
}

} // namespace ergphase
