#include "bcross/special_fns.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bcross/errors.hpp"

namespace bcross {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double log_norm_cdf(double x) {
    if (std::isnan(x)) return x;
    if (x > 0.0) return std::log1p(-norm_cdf(-x));
    if (x > -37.0) return std::log(norm_cdf(x));
    // Mills-ratio asymptotic series; at |x| >= 37 four terms are exact to
    // double precision.
    const double z2 = 1.0 / (x * x);
    const double series = 1.0 - z2 * (1.0 - 3.0 * z2 * (1.0 - 5.0 * z2 * (1.0 - 7.0 * z2)));
    return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_pdf_deriv(unsigned k, double x) {
    if (k == 0) return norm_cdf(x);
    const double density = norm_pdf(x);
    if (density == 0.0) return 0.0;
    const double h = hermite_eval(k - 1, x);
    return ((k - 1) % 2 == 0 ? h : -h) * density;
}

Correlation::Correlation(double rho) : rho_(rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) {
        throw DomainError("correlation must lie in [-1, 1]");
    }
}

double hermite_eval(unsigned n, double x) {
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (unsigned k = 1; k < n; ++k) {
        const double next = x * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double HermitePoly::derivative(double x) const {
    if (order_ == 0) return 0.0;
    return static_cast<double>(order_) * hermite_eval(order_ - 1, x);
}

double hermite_largest_zero(unsigned n) {
    if (n == 0) throw DomainError("H_0 has no zeros");
    if (n == 1) return 0.0;
    if (n == 2) return 1.0;

    // Newton from the right of all zeros converges monotonically to the
    // largest one for a real-rooted polynomial. sqrt(4n + 2) bounds every
    // zero; the asymptotic estimate is used when it already lies to the right.
    const double nn = static_cast<double>(n);
    const double upper = std::sqrt(4.0 * nn + 2.0);
    const double guess =
        std::numbers::sqrt2 * (std::sqrt(2.0 * nn + 1.0) - 1.85575 * std::pow(2.0 * nn + 1.0, -1.0 / 6.0));

    auto value_and_slope = [n](double x) {
        double prev = 1.0;
        double cur = x;
        for (unsigned k = 1; k < n; ++k) {
            const double next = x * cur - static_cast<double>(k) * prev;
            prev = cur;
            cur = next;
        }
        return std::pair{cur, static_cast<double>(n) * prev};
    };

    double x = upper;
    {
        auto [p, dp] = value_and_slope(guess);
        if (p > 0.0 && dp > 0.0 && p / dp < 0.5) x = guess;
    }
    double positive_side = x;
    for (int iter = 0; iter < 200; ++iter) {
        auto [p, dp] = value_and_slope(x);
        if (p == 0.0) return x;
        if (p < 0.0) break;  // rounding crossed the root; bisect below
        positive_side = x;
        const double step = p / dp;
        const double next = x - step;
        if (!(next < x)) return x;
        if (step <= 1e-15 * x) return next;
        x = next;
    }
    double lo = x;
    double hi = positive_side;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (value_and_slope(mid).first > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace bcross
