#include <algorithm>
#include <cmath>
#include <numbers>

#include "analytics_internal.hpp"
#include "bcross/analytics.hpp"
#include "bcross/errors.hpp"
#include "bcross/special_fns.hpp"

namespace bcross {

namespace {

void require_two_sided(const BarrierSpec& spec) {
    if (!spec.two_sided()) throw DomainError("expected a two-sided barrier");
}

// 1 + 2 sum_{j>=1} (-1)^j exp(-j^2 w^2 / (2 r)), cut at an even j once the
// terms drop below 1e-15.
double constant_band_series(double width, double remaining) {
    double sum = 1.0;
    for (int j = 1;; ++j) {
        const double term = std::exp(-static_cast<double>(j) * j * width * width / (2.0 * remaining));
        sum += (j % 2 == 0 ? 2.0 : -2.0) * term;
        if (term < 1e-15 && j % 2 == 0) break;
    }
    return sum;
}

}  // namespace

double two_sided_cdf(const BarrierSpec& spec, double t) {
    require_two_sided(spec);
    const double horizon = spec.horizon();
    if (!(t > 0.0 && t <= horizon)) throw DomainError("sigma distribution needs 0 < t <= T");
    const Band band = band_eval(spec, t);
    const double rt = std::sqrt(t);
    if (t == horizon) return std::clamp(norm_cdf(band.upper / rt) - norm_cdf(band.lower / rt), 0.0, 1.0);
    const BandMeasures bm = band_measures(spec, 0.0);
    const double rho = std::sqrt(t / horizon);
    double value = 0.0;
    const double levels[2] = {band.upper, band.lower};
    for (int i = 0; i < 2; ++i) {
        const double x = levels[i] / rt;
        const double term = norm_cdf(x) - n2_pairing(bm.upper, x, -rho) - n2_pairing_mirror(bm.lower, x, rho);
        value += i == 0 ? term : -term;
    }
    return std::clamp(value, 0.0, 1.0);
}

double two_sided_sigma_pdf(const BarrierSpec& spec, double t) {
    require_two_sided(spec);
    const double horizon = spec.horizon();
    detail::require_open_interval(t, horizon, "sigma density");
    const double rem = horizon - t;
    const double rt = std::sqrt(t);
    if (spec.family() == Family::TwoSidedConstant) {
        const auto& p = spec.as<params::TwoSidedConstant>();
        return (norm_pdf(p.a / rt) + norm_pdf(p.b / rt)) / std::sqrt(2.0 * std::numbers::pi * t * rem) *
               constant_band_series(p.a - p.b, rem);
    }
    const auto& p = spec.as<params::TwoSidedCurved>();
    const Band band = curved_two_sided_solve(spec, t);
    const double s = std::sqrt(rem);
    return (norm_pdf(band.upper / rt) + norm_pdf(band.lower / rt)) / (2.0 * p.c * std::sqrt(t * rem)) *
           (norm_pdf((band.upper - p.a) / s) - norm_pdf((band.upper - p.b) / s));
}

double two_sided_sigma_pdf_general(const BarrierSpec& spec, double t) {
    require_two_sided(spec);
    detail::require_open_interval(t, spec.horizon(), "sigma density");
    const Band band = band_eval(spec, t);
    const BandMeasures bm = band_measures(spec, 0.0);
    const ImageMeasure up = bm.upper.derivative();
    const ImageMeasure low = bm.lower.derivative();
    const double rt = std::sqrt(t);
    const double levels[2] = {band.upper, band.lower};
    double value = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double g = levels[i];
        const double term = norm_pdf(g / rt) * (u_eval(up, g, t) - u_eval(low, g, t)) / (2.0 * rt);
        value += i == 0 ? term : -term;
    }
    return value;
}

}  // namespace bcross
