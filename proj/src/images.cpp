#include <algorithm>
#include <cmath>

#include "analytics_internal.hpp"
#include "bcross/analytics.hpp"
#include "bcross/errors.hpp"
#include "bcross/special_fns.hpp"

namespace bcross {

namespace {

const params::ImagesLambert& images_params(const BarrierSpec& spec) {
    if (spec.family() != Family::ImagesLambert) throw DomainError("expected an images-lambert barrier");
    return spec.as<params::ImagesLambert>();
}

void require_atoms_only(const ImageMeasure& m) {
    if (!m.exp_components().empty()) throw DomainError("images family measures must consist of atoms only");
}

void require_images_time(const BarrierSpec& spec, double horizon) {
    if (!(horizon > 0.0 && horizon <= spec.horizon())) throw DomainError("images crossing needs 0 < T <= T'");
}

// int exp((2 f v - v^2) / (2t)) dm(v). For an atom of order n the pairing is
// t^(-n/2) H_n((a - f)/sqrt t) exp(q(a)); evaluated in log space since q(a)
// grows like a^2/(2t).
double images_pairing(const ImageMeasure& m, double f, double t) {
    const double rt = std::sqrt(t);
    double total = 0.0;
    for (const auto& atom : m.atoms()) {
        const double v = atom.location;
        const double coef = atom.weight * hermite_eval(atom.order, (v - f) / rt);
        if (coef == 0.0) continue;
        const double log_mag = std::log(std::abs(coef)) - 0.5 * atom.order * std::log(t) + (2.0 * f * v - v * v) / (2.0 * t);
        total += std::copysign(std::exp(log_mag), coef);
    }
    return total;
}

}  // namespace

namespace detail {

double images_crossing_value(const BarrierSpec& spec, const ImageMeasure& m, double horizon) {
    const double f = barrier_eval(spec, horizon);
    const double value = norm_cdf(-f / std::sqrt(horizon)) + u_functional(m, f, horizon);
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace detail

ImagesConditionReport images_condition(const BarrierSpec& spec, const ImageMeasure& m, std::size_t grid_points) {
    images_params(spec);
    require_atoms_only(m);
    if (grid_points == 0) throw DomainError("images condition needs a non-empty grid");
    ImagesConditionReport report;
    const double horizon = spec.horizon();
    for (std::size_t k = 1; k <= grid_points; ++k) {
        const double t = horizon * static_cast<double>(k) / static_cast<double>(grid_points);
        const double dev = std::abs(images_pairing(m, barrier_eval(spec, t), t) - 1.0);
        if (dev > report.max_abs_deviation || std::isnan(dev)) {
            report.max_abs_deviation = dev;
            report.worst_time = t;
        }
    }
    report.holds = report.max_abs_deviation < kImagesTolerance;
    return report;
}

CrossingResult images_crossing(const BarrierSpec& spec, const ImageMeasure& m, double horizon) {
    const auto& p = images_params(spec);
    require_images_time(spec, horizon);
    require_atoms_only(m);
    const ImagesConditionReport rep = images_condition(spec, m);
    if (!rep.holds) {
        throw PreconditionError("images condition fails: deviation " + detail::fmt(rep.max_abs_deviation) +
                                " at t = " + detail::fmt(rep.worst_time));
    }
    const double f0 = 0.5 * p.a;
    if (!(m.support_min() > f0)) throw PreconditionError("image measure must be supported in (f(0), inf)");
    CrossingResult r;
    r.formula = "N(-f(T)/sqrt T) + U(f(T), 0; mu)";
    r.condition_report.push_back({"images condition on (0, T'] (max deviation " + detail::fmt(rep.max_abs_deviation) + ")", true});
    r.condition_report.push_back({"support of mu in (f(0), inf)", true});
    r.conditions_met = true;
    r.probability = detail::images_crossing_value(spec, m, horizon);
    return r;
}

double images_crossing_explicit(const BarrierSpec& spec, double horizon) {
    const auto& p = images_params(spec);
    require_images_time(spec, horizon);
    const double f = barrier_eval(spec, horizon);
    const double rt = std::sqrt(horizon);
    return norm_cdf(-f / rt) + rt / (p.a - f) * norm_pdf(f / rt);
}

double images_hitting_pdf(const BarrierSpec& spec, const ImageMeasure& m, double horizon) {
    images_params(spec);
    require_images_time(spec, horizon);
    require_atoms_only(m);
    const double f = barrier_eval(spec, horizon);
    const double rt = std::sqrt(horizon);
    // pairing of v N'((v - f)/sqrt T): d^n [v chi] = v chi^(n) + n chi^(n-1)
    double total = 0.0;
    for (const auto& atom : m.atoms()) {
        const unsigned n = atom.order;
        const double z = (atom.location - f) / rt;
        double d = atom.location * std::pow(rt, -static_cast<double>(n)) * norm_pdf_deriv(n + 1, z);
        if (n > 0) d += n * std::pow(rt, -static_cast<double>(n - 1)) * norm_pdf_deriv(n, z);
        total += (n % 2 == 0 ? 1.0 : -1.0) * atom.weight * d;
    }
    return total / (2.0 * horizon * rt);
}

double images_hitting_pdf_explicit(const BarrierSpec& spec, double horizon) {
    const auto& p = images_params(spec);
    require_images_time(spec, horizon);
    const double f = barrier_eval(spec, horizon);
    const double rt = std::sqrt(horizon);
    return (p.a - horizon / (p.a - f)) * norm_pdf(f / rt) / (2.0 * horizon * rt);
}

}  // namespace bcross
