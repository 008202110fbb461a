#include "bcross/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "analytics_internal.hpp"
#include "bcross/errors.hpp"
#include "bcross/special_fns.hpp"

namespace bcross {

namespace {

using detail::fmt;

constexpr double kConditionSlack = 1e-12;
constexpr double kIdentityTolerance = 1e-9;

CrossingResult finish(CrossingResult r, double value) {
    r.conditions_met = std::all_of(r.condition_report.begin(), r.condition_report.end(),
                                   [](const Condition& c) { return c.satisfied; });
    if (r.conditions_met) r.probability = std::clamp(value, 0.0, 1.0);
    return r;
}

void require_sigma_time(const BarrierSpec& spec, double t) {
    if (!(t > 0.0 && t <= spec.horizon())) throw DomainError("sigma distribution needs 0 < t <= T");
}

void require_sigma_family(const BarrierSpec& spec) {
    switch (spec.family()) {
        case Family::Linear:
        case Family::SqrtRemaining:
        case Family::LogRemaining:
        case Family::HermiteFamily:
        case Family::TwoSidedConstant:
        case Family::TwoSidedCurved:
            return;
        default:
            throw DomainError("sigma distribution is not available for the " + std::string(family_name(spec.family())) +
                              " family");
    }
}

void require_lambda_family(const BarrierSpec& spec) {
    if (spec.family() != Family::Linear && spec.family() != Family::SqrtRemaining) {
        throw DomainError("lambda distribution is only available for linear and sqrt-remaining barriers");
    }
}

CrossingResult linear_crossing(const params::Linear& p, double horizon, double shift) {
    const double a = p.a - shift;
    const double b = p.b;
    CrossingResult r;
    r.formula = "N((-a-bT)/sqrt T) + exp(-2ab) N((bT-a)/sqrt T)";
    r.condition_report.push_back({"a - start >= 0 (a - start = " + fmt(a) + ")", a >= 0.0});
    const double rt = std::sqrt(horizon);
    const double value = norm_cdf((-a - b * horizon) / rt) + std::exp(-2.0 * a * b + log_norm_cdf((b * horizon - a) / rt));
    return finish(std::move(r), value);
}

CrossingResult sqrt_crossing(const params::SqrtRemaining& p, double horizon, double shift, bool strict) {
    const double a = p.a - shift;
    const double rt = std::sqrt(horizon);
    CrossingResult r;
    r.formula = "N(-a/sqrt T) / N(b)";
    const double g0 = a + p.b * rt;
    if (strict) {
        r.condition_report.push_back({"a + b sqrt(T) > 0 (value " + fmt(g0) + ")", g0 > 0.0});
    } else {
        r.condition_report.push_back({"a - start + b sqrt(T) >= 0 (value " + fmt(g0) + ")", g0 >= 0.0});
    }
    return finish(std::move(r), norm_cdf(-a / rt) / norm_cdf(p.b));
}

CrossingResult log_crossing(const params::LogRemaining& p, double horizon, double shift) {
    const double a = p.a - shift;
    CrossingResult r;
    r.formula = "sqrt(b/T) exp(-a^2/(2T))";
    const double bound = std::sqrt(horizon * std::log(p.b / horizon));
    r.condition_report.push_back({"a - start >= sqrt(T ln(b/T)) (" + fmt(a) + " vs " + fmt(bound) + ")", a >= bound});
    return finish(std::move(r), std::sqrt(p.b / horizon) * std::exp(-a * a / (2.0 * horizon)));
}

CrossingResult hermite_crossing(const params::Hermite& p, double horizon, double shift) {
    const double a = p.a - shift;
    const double rt = std::sqrt(horizon);
    CrossingResult r;
    r.formula = "b T^(-n/2) H_(n-1)(a/sqrt T) exp(-a^2/(2T))";
    const double value =
        p.b * std::pow(horizon, -0.5 * p.n) * hermite_eval(p.n - 1, a / rt) * std::exp(-a * a / (2.0 * horizon));
    r.condition_report.push_back(
        {"a - start >= z_n sqrt(T) (" + fmt(a) + " vs " + fmt(p.largest_zero * rt) + ")", a >= p.largest_zero * rt});
    r.condition_report.push_back({"b T^(-n/2) H_(n-1)(a/sqrt T) exp(-a^2/(2T)) <= 1 (value " + fmt(value) + ")",
                                  value <= 1.0 + kConditionSlack});
    return finish(std::move(r), value);
}

CrossingResult two_sided_crossing(const BarrierSpec& spec, double start) {
    CrossingResult r;
    const bool constant = spec.family() == Family::TwoSidedConstant;
    double a = 0.0;
    double b = 0.0;
    if (constant) {
        const auto& p = spec.as<params::TwoSidedConstant>();
        a = p.a;
        b = p.b;
        r.formula = "2 sum_j (-1)^j [N((-a + j(b-a))/sqrt T) + N((b + j(b-a))/sqrt T)]";
    } else {
        const auto& p = spec.as<params::TwoSidedCurved>();
        a = p.a;
        b = p.b;
        r.formula = "c^-1 N(-a/sqrt T) + c^-1 N(b/sqrt T)";
    }
    r.condition_report.push_back({"b < start < a", b < start && start < a});
    const Band band0 = band_eval(spec, 0.0);
    r.condition_report.push_back({"g1(0) <= start <= g0(0) (band [" + fmt(band0.lower) + ", " + fmt(band0.upper) + "])",
                                  band0.lower <= start && start <= band0.upper});
    if (!std::all_of(r.condition_report.begin(), r.condition_report.end(), [](const Condition& c) { return c.satisfied; })) {
        return finish(std::move(r), 0.0);
    }
    const BarrierSpec moved = spec.translated(start);
    const BandMeasures bm = band_measures(moved, 0.0);
    if (constant) {
        r.condition_report.push_back(
            {"image series truncated at j = " + std::to_string(bm.truncation) + " (terms below 1e-15)", true});
    }
    const double rt = std::sqrt(spec.horizon());
    // U_0(0, 0; mu_0) + U_1(0, 0; mu_1), summed from the smallest terms up.
    double value = 0.0;
    const auto& up = bm.upper.atoms();
    const auto& low = bm.lower.atoms();
    for (std::size_t j = up.size(); j-- > 0;) {
        value += up[j].weight * norm_cdf(-up[j].location / rt);
        value += low[j].weight * norm_cdf(low[j].location / rt);
    }
    return finish(std::move(r), value);
}

}  // namespace

namespace detail {

void require_open_interval(double t, double horizon, const char* what) {
    if (!(t > 0.0 && t < horizon)) throw DomainError(std::string(what) + " needs 0 < t < T");
}

}  // namespace detail

CrossingResult crossing_prob(const BarrierSpec& spec, double start) {
    if (!std::isfinite(start)) throw DomainError("start must be finite");
    const double horizon = spec.horizon();
    switch (spec.family()) {
        case Family::Linear:
            return linear_crossing(spec.as<params::Linear>(), horizon, start);
        case Family::SqrtRemaining:
            return sqrt_crossing(spec.as<params::SqrtRemaining>(), horizon, start, false);
        case Family::LogRemaining:
            return log_crossing(spec.as<params::LogRemaining>(), horizon, start);
        case Family::HermiteFamily:
            return hermite_crossing(spec.as<params::Hermite>(), horizon, start);
        case Family::TimeInverted: {
            const BarrierSpec& base = *spec.as<params::TimeInverted>().base;
            CrossingResult r = base.family() == Family::SqrtRemaining
                                   ? sqrt_crossing(base.as<params::SqrtRemaining>(), horizon, 0.0, true)
                                   : crossing_prob(base, 0.0);
            r.formula = "time inversion: P(exists t >= T : W_t = g_hat(t)) = " + r.formula;
            r.condition_report.push_back({"start = 0", start == 0.0});
            if (start != 0.0) {
                r.conditions_met = false;
                r.probability.reset();
            }
            return r;
        }
        case Family::TwoSidedConstant:
        case Family::TwoSidedCurved:
            return two_sided_crossing(spec, start);
        case Family::ImagesLambert: {
            if (start != 0.0) {
                CrossingResult r;
                r.formula = "N(-f(T)/sqrt T) + U(f(T), 0; mu)";
                r.condition_report.push_back({"start = 0", false});
                return r;
            }
            return images_crossing(spec, image_measure(spec), horizon);
        }
    }
    throw DomainError("unknown family");
}

CrossingResult crossing_prob_via_measure(const std::function<double(double)>& g, const ImageMeasure& m, double start,
                                         std::size_t grid_points) {
    const double horizon = m.horizon();
    CrossingResult r;
    r.formula = "U(start, 0; mu)";
    const double g0 = g(0.0);
    const double g_end = g(horizon);
    r.condition_report.push_back({"start <= g(0) (g(0) = " + fmt(g0) + ")", start <= g0});
    r.condition_report.push_back({"support of mu in [g(T), inf) (support starts at " + fmt(m.support_min()) + ")",
                                  m.support_min() >= g_end - kConditionSlack * std::max(1.0, std::abs(g_end))});
    const auto grid = remaining_time_grid(horizon, grid_points);
    const IdentityReport rep = verify_barrier_identity(m, g, grid);
    r.condition_report.push_back({"U(g(t), t; mu) = 1 on the grid (max deviation " + fmt(rep.max_abs_deviation) + ")",
                                  rep.max_abs_deviation < kIdentityTolerance});
    r.condition_report.push_back({"|U(w, t; mu)| bounded for w <= g(t) (growth " + fmt(rep.bound_growth) + ")",
                                  rep.bounded});
    return finish(std::move(r), u_eval(m, start, 0.0));
}

double sigma_cdf(const BarrierSpec& spec, double t) {
    require_sigma_family(spec);
    require_sigma_time(spec, t);
    if (spec.two_sided()) return two_sided_cdf(spec, t);
    const double horizon = spec.horizon();
    const double x = barrier_eval(spec, t) / std::sqrt(t);
    if (t == horizon) return norm_cdf(x);
    const double value = norm_cdf(x) - n2_pairing(image_measure(spec), x, -std::sqrt(t / horizon));
    return std::clamp(value, 0.0, 1.0);
}

double sigma_pdf(const BarrierSpec& spec, double t) {
    require_sigma_family(spec);
    if (spec.two_sided()) return two_sided_sigma_pdf(spec, t);
    const double horizon = spec.horizon();
    detail::require_open_interval(t, horizon, "sigma density");
    const double rem = horizon - t;
    const double kernel = norm_pdf(barrier_eval(spec, t) / std::sqrt(t));
    switch (spec.family()) {
        case Family::Linear: {
            const double b = spec.as<params::Linear>().b;
            const double s = std::sqrt(rem);
            return (norm_pdf(b * s) / s + b * norm_cdf(b * s)) * kernel / std::sqrt(t);
        }
        case Family::SqrtRemaining: {
            const double b = spec.as<params::SqrtRemaining>().b;
            return norm_pdf(b) / (2.0 * norm_cdf(b) * std::sqrt(t * rem)) * kernel;
        }
        case Family::LogRemaining: {
            const double b = spec.as<params::LogRemaining>().b;
            return 0.5 * std::sqrt(std::log(b / rem) / (t * rem)) * kernel;
        }
        case Family::HermiteFamily: {
            const unsigned n = spec.as<params::Hermite>().n;
            const double x = hermite_barrier_x(spec, t);
            return hermite_eval(n, x) / (2.0 * hermite_eval(n - 1, x) * std::sqrt(t * rem)) * kernel;
        }
        default:
            break;
    }
    throw DomainError("no explicit sigma density for this family");
}

double sigma_pdf_general(const BarrierSpec& spec, double t) {
    require_sigma_family(spec);
    if (spec.two_sided()) return two_sided_sigma_pdf_general(spec, t);
    detail::require_open_interval(t, spec.horizon(), "sigma density");
    const double g = barrier_eval(spec, t);
    return norm_pdf(g / std::sqrt(t)) * u_eval_derivative(image_measure(spec), g, t) / (2.0 * std::sqrt(t));
}

double lambda_cdf(const BarrierSpec& spec, double t) {
    require_lambda_family(spec);
    return std::min(1.0, sigma_cdf(spec, t) + sigma_cdf(spec.negated(), t));
}

double lambda_pdf(const BarrierSpec& spec, double t) {
    require_lambda_family(spec);
    const double horizon = spec.horizon();
    detail::require_open_interval(t, horizon, "lambda density");
    const double rem = horizon - t;
    const double kernel = norm_pdf(barrier_eval(spec, t) / std::sqrt(t));
    if (spec.family() == Family::Linear) {
        const double b = spec.as<params::Linear>().b;
        const double s = std::sqrt(rem);
        return (2.0 * norm_pdf(b * s) / s + b * (norm_cdf(b * s) - norm_cdf(-b * s))) * kernel / std::sqrt(t);
    }
    const double b = spec.as<params::SqrtRemaining>().b;
    return norm_pdf(b) / (2.0 * norm_cdf(b) * norm_cdf(-b)) / std::sqrt(t * rem) * kernel;
}

double lambda_pdf_symmetric(const BarrierSpec& spec, double t) {
    require_lambda_family(spec);
    return sigma_pdf(spec, t) + sigma_pdf(spec.negated(), t);
}

namespace {

const BarrierSpec& inverted_base(const BarrierSpec& spec) {
    if (spec.family() != Family::TimeInverted) throw DomainError("expected a time-inverted barrier");
    return *spec.as<params::TimeInverted>().base;
}

}  // namespace

double hitting_cdf_inverted(const BarrierSpec& spec, double t) {
    const BarrierSpec& base = inverted_base(spec);
    const double horizon = spec.horizon();
    if (!(t >= horizon) || std::isinf(t)) throw DomainError("time-inverted hitting distribution needs T <= t < inf");
    return std::clamp(1.0 - sigma_cdf(base, horizon * horizon / t), 0.0, 1.0);
}

double hitting_pdf_inverted(const BarrierSpec& spec, double t) {
    const BarrierSpec& base = inverted_base(spec);
    const double horizon = spec.horizon();
    if (!(t > horizon) || std::isinf(t)) throw DomainError("time-inverted hitting density needs T < t < inf");
    const double s = horizon * horizon / t;
    return horizon * horizon / (t * t) * sigma_pdf(base, s);
}

double hitting_pdf_inverted_explicit(const BarrierSpec& spec, double t) {
    const BarrierSpec& base = inverted_base(spec);
    if (base.family() != Family::SqrtRemaining) throw DomainError("explicit hitting density needs a sqrt-remaining base");
    const double horizon = spec.horizon();
    if (!(t > horizon) || std::isinf(t)) throw DomainError("time-inverted hitting density needs T < t < inf");
    const double b = base.as<params::SqrtRemaining>().b;
    return norm_pdf(b) / (2.0 * norm_cdf(b) * t * std::sqrt(t / horizon - 1.0)) *
           norm_pdf(barrier_eval(spec, t) / std::sqrt(t));
}

}  // namespace bcross
