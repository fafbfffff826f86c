#pragma once

#include <cmath>
#include <algorithm>

namespace ergphase {

namespace detail {

// x^k for small nonnegative integer exponents, by repeated multiplication.
inline double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

} // namespace detail

struct BisectSpec {
    double interval_abs = 1e-13;
    // When positive, also stop once width <= interval_rel * min(|lo|, |hi|).
    // Needed for roots many orders of magnitude below 1, where an absolute
    // width test would leave no correct digits.
    double interval_rel = 0.0;
    int max_iter = 240;
    // Geometric midpoints keep relative precision when the bracket spans
    // decades; only used while both ends are positive.
    bool geometric = false;
};

// Bisection on [lo, hi] for a function with one sign change inside.
// f_lo carries the sign of f at lo; callers that already evaluated the
// endpoint (possibly +-inf there) pass it in rather than paying twice.
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, const BisectSpec& bs = {}) {
    const bool rising = f_lo < 0.0;
    for (int it = 0; it < bs.max_iter; ++it) {
        const double width = hi - lo;
        if (width <= bs.interval_abs) break;
        if (bs.interval_rel > 0.0 &&
            width <= bs.interval_rel * std::min(std::fabs(lo), std::fabs(hi)))
            break;
        double mid;
        if (bs.geometric && lo > 0.0 && hi > 0.0)
            mid = std::exp(0.5 * (std::log(lo) + std::log(hi)));
        else
            mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;  // bracket exhausted at this precision
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == rising)
            lo = mid;
        else
            hi = mid;
    }
    if (bs.geometric && lo > 0.0 && hi > 0.0)
        return std::exp(0.5 * (std::log(lo) + std::log(hi)));
    return 0.5 * (lo + hi);
}

} // namespace ergphase
