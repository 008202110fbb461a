#include <cmath>
#include <limits>
#include <numbers>

#include "bcross/errors.hpp"
#include "bcross/special_fns.hpp"

namespace bcross {

namespace {

// e split so that fma(kEHi, x, 1) + kELo * x resolves 1 + e x near x = -1/e.
constexpr double kEHi = 2.718281828459045;
constexpr double kELo = 1.4456468917292502e-16;
constexpr int kMaxIter = 64;

// 1 + e x, computed with extra care near the branch point.
double branch_distance(double x) { return std::fma(kEHi, x, 1.0) + kELo * x; }

// Series about the branch point in p = +-sqrt(2 (1 + e x)).
double branch_series(double p) {
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

double halley(double w, double x) {
    for (int i = 0; i < kMaxIter; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if (denom == 0.0) break;
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) break;
    }
    return w;
}

// Newton on w + log|w| = target, used away from the branch point where the
// log form keeps full relative accuracy.
double log_form_newton(double w, double target, bool negative) {
    for (int i = 0; i < kMaxIter; ++i) {
        const double h = w + std::log(negative ? -w : w) - target;
        const double step = h * w / (w + 1.0);
        w -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) break;
    }
    return w;
}

}  // namespace

double lambert_w_lower_from_log(double log_neg_x) {
    if (!(log_neg_x <= -1.0)) throw DomainError("lower Lambert branch needs -1/e <= x < 0");
    if (log_neg_x > -1.0 - 1e-3) return lambert_w(LambertBranch::lower, -std::exp(log_neg_x));
    const double l1 = log_neg_x;
    const double l2 = std::log(-l1);
    double w = l1 - l2 + l2 / l1;
    if (w > -1.0) w = -1.0 - 1e-3;
    return log_form_newton(w, log_neg_x, true);
}

double lambert_w(LambertBranch branch, double x) {
    if (std::isnan(x)) return x;
    const double dist = branch_distance(x);
    if (dist < 0.0) {
        if (dist > -4.0 * std::numeric_limits<double>::epsilon()) return -1.0;
        throw DomainError("Lambert W is real only for x >= -1/e");
    }
    const double p = std::sqrt(2.0 * dist);

    if (branch == LambertBranch::principal) {
        if (x == 0.0) return 0.0;
        if (std::isinf(x)) return x;
        if (p < 1e-3) return branch_series(p);
        if (x < -0.25) return halley(branch_series(p), x);
        if (x < 3.0) {
            const double l = std::log1p(x);
            return halley(l * (1.0 - std::log1p(l) / (2.0 + l)), x);
        }
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        return log_form_newton(l1 - l2 + l2 / l1, l1, false);
    }

    if (!(x < 0.0)) throw DomainError("lower Lambert branch needs -1/e <= x < 0");
    if (p < 1e-3) return branch_series(-p);
    if (x < -0.25) return halley(branch_series(-p), x);
    return lambert_w_lower_from_log(std::log(-x));
}

}  // namespace bcross
