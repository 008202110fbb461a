#pragma once

#include <cmath>
#include <limits>

namespace bcross::detail {

/// Safeguarded Newton on a bracket [lo, hi] with f(lo), f(hi) of opposite
/// sign. `fdf(x)` returns {f(x), f'(x)}. Falls back to bisection whenever the
/// Newton step leaves the bracket or fails to halve it.
template <class FdF>
double bracketed_newton(FdF fdf, double lo, double hi, double xtol = 4.0 * std::numeric_limits<double>::epsilon(),
                        int max_iter = 200) {
    auto [flo, dlo] = fdf(lo);
    (void)dlo;
    if (flo == 0.0) return lo;
    const bool increasing = flo < 0.0;
    double x = 0.5 * (lo + hi);
    double step_old = hi - lo;
    double step = step_old;
    for (int i = 0; i < max_iter; ++i) {
        auto [f, df] = fdf(x);
        if (f == 0.0) return x;
        if ((f < 0.0) == increasing) {
            lo = x;
        } else {
            hi = x;
        }
        const double newton = (df != 0.0 && std::isfinite(df)) ? x - f / df : std::numeric_limits<double>::quiet_NaN();
        if (!(newton > lo && newton < hi) || std::abs(2.0 * (x - newton)) > std::abs(step_old)) {
            step_old = step;
            step = 0.5 * (hi - lo);
            x = lo + step;
        } else {
            step_old = step;
            step = x - newton;
            x = newton;
        }
        if (std::abs(step) <= xtol * std::max(1.0, std::abs(x)) || hi - lo <= xtol * std::max(1.0, std::abs(x))) {
            return x;
        }
    }
    return x;
}

}  // namespace bcross::detail
