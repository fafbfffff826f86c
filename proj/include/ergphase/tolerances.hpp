#pragma once

namespace ergphase {

// One knob object threaded through every solver.  The regression numbers in
// the test suite were frozen with these defaults; changing them invalidates
// those expectations.
struct ToleranceConfig {
    // Stationary-point bracketing: uniform scan points on [margin, 1-margin].
    int grid_points = 4096;
    double grid_margin = 1e-9;

    // Bisection stops once the bracket width drops below this.
    double root_interval = 1e-13;
    int max_bisect_iter = 240;

    // Two local maxima are co-global when |value difference| <= tie_rel * (1 + |value|).
    double tie_rel = 1e-9;

    // Classification bands: |beta2 - r| for the transition surface, Euclidean
    // distance in the (beta1, beta2) plane for the critical curve.
    double on_surface_band = 1e-7;
    double critical_band = 1e-6;

    // Residual bound used when certifying the degenerate triple root at a
    // critical point, scaled by the magnitude of the couplings involved.
    double triple_root_residual = 1e-7;
};

} // namespace ergphase
