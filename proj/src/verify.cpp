#include "bcross/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bcross/analytics.hpp"
#include "bcross/special_fns.hpp"

namespace bcross {

namespace {

constexpr double kE = std::numbers::e;

std::string label(const BarrierSpec& spec) {
    std::ostringstream os;
    os.precision(10);
    os << family_name(spec.family()) << "(";
    switch (spec.family()) {
        case Family::HermiteFamily: {
            const auto& p = spec.as<params::Hermite>();
            os << "n=" << p.n << ",a=" << p.a << ",b=" << p.b;
            break;
        }
        case Family::TwoSidedCurved: {
            const auto& p = spec.as<params::TwoSidedCurved>();
            os << "a=" << p.a << ",b=" << p.b << ",c=" << p.c;
            break;
        }
        case Family::TimeInverted:
            os << label(*spec.as<params::TimeInverted>().base);
            break;
        default: {
            std::visit(
                [&](const auto& p) {
                    if constexpr (requires { p.a; p.b; }) os << "a=" << p.a << ",b=" << p.b;
                },
                spec.params());
        }
    }
    os << ",T=" << spec.horizon() << ")";
    return os.str();
}

CheckResult check(std::string name, double value, double tolerance, std::string detail = {}) {
    return {std::move(name), value < tolerance, value, tolerance, std::move(detail)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void identity_checks(std::vector<CheckResult>& out) {
    const BarrierSpec specs[] = {
        BarrierSpec::linear(1.0, 0.5, 1.0),       BarrierSpec::linear(1.0, -0.5, 1.0),
        BarrierSpec::sqrt_remaining(1.0, 0.5, 1.0), BarrierSpec::log_remaining(1.5, kE, 1.0),
        BarrierSpec::hermite(1, 1.5, 2.0, 1.0),   BarrierSpec::hermite(2, 2.0, 10.0, 1.0),
        BarrierSpec::hermite(3, 3.0, 30.0, 1.0),
    };
    const auto grid = remaining_time_grid(1.0, 1000);
    for (const auto& spec : specs) {
        const IdentityReport rep = verify_barrier_identity(image_measure(spec), barrier_function(spec), grid);
        out.push_back(check("identity/" + label(spec), rep.max_abs_deviation, 1e-9));
        out.push_back(check("bounded/" + label(spec), rep.bound_growth, kBoundGrowthLimit));
    }
    const auto images = BarrierSpec::images_lambert(1.0, 2.0, 1.0);
    out.push_back(check("images-condition/" + label(images),
                        images_condition(images, image_measure(images)).max_abs_deviation, kImagesTolerance));
}

void exact_checks(std::vector<CheckResult>& out) {
    double worst = 0.0;
    for (double a : {0.25, 1.0, 2.5}) {
        for (double horizon : {0.5, 1.0, 3.0}) {
            const double p = *crossing_prob(BarrierSpec::sqrt_remaining(a, 0.0, horizon)).probability;
            worst = std::max(worst, std::abs(p - 2.0 * norm_cdf(-a / std::sqrt(horizon))));
        }
    }
    out.push_back(check("reflection/sqrt-remaining(b=0)", worst, 1e-14));

    worst = 0.0;
    for (const auto& spec : {BarrierSpec::linear(0.0, 0.0, 1.0), BarrierSpec::sqrt_remaining(0.0, 0.0, 1.0)}) {
        for (int i = 1; i <= 99; ++i) {
            const double t = i / 100.0;
            worst = std::max(worst, rel(lambda_pdf(spec, t), 1.0 / (std::numbers::pi * std::sqrt(t * (1.0 - t)))));
        }
    }
    out.push_back(check("arcsine/lambda-density(a=b=0)", worst, 1e-13));

    worst = 0.0;
    for (const auto& base : {BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0), BarrierSpec::linear(1.0, 0.3, 2.0),
                             BarrierSpec::log_remaining(2.0, kE, 1.0)}) {
        const double direct = *crossing_prob(base).probability;
        const double inverted = *crossing_prob(time_invert(base)).probability;
        worst = std::max(worst, std::abs(direct - inverted));
    }
    out.push_back(check("time-inversion/crossing", worst, 1e-14));

    worst = 0.0;
    for (const auto& spec : {BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0), BarrierSpec::sqrt_remaining(0.5, -0.3, 2.0)}) {
        const auto twice = time_invert(time_invert(spec));
        for (int i = 0; i <= 100; ++i) {
            const double t = spec.horizon() * i / 100.0;
            worst = std::max(worst, std::abs(barrier_eval(twice, t) - barrier_eval(spec, t)));
        }
    }
    out.push_back(check("time-inversion/involution", worst, 1e-14));

    worst = 0.0;
    for (const auto& spec : {BarrierSpec::linear(1.0, 0.5, 1.0), BarrierSpec::log_remaining(1.5, kE, 1.0),
                             BarrierSpec::hermite(2, 2.0, 10.0, 1.0)}) {
        worst = std::max(worst, std::abs(sigma_cdf(spec, spec.horizon()) -
                                         norm_cdf(barrier_eval(spec, spec.horizon()) / std::sqrt(spec.horizon()))));
    }
    out.push_back(check("endpoint/sigma-cdf(T)", worst, 1e-12));

    worst = 0.0;
    const auto curved = BarrierSpec::two_sided_curved(1.0, -1.0, 0.5, 1.0);
    for (int i = 0; i <= 100; ++i) {
        const Band band = band_eval(curved, i / 100.0);
        worst = std::max(worst, std::abs(band.upper + band.lower - (1.0 + -1.0)));
    }
    out.push_back({"band-symmetry/" + label(curved), worst == 0.0, worst, 0.0, "g0 + g1 = a + b exactly"});
}

void derivative_checks(std::vector<CheckResult>& out) {
    constexpr double h = 1e-5;
    const BarrierSpec specs[] = {
        BarrierSpec::linear(1.0, 0.5, 1.0),          BarrierSpec::sqrt_remaining(1.0, 0.5, 1.0),
        BarrierSpec::log_remaining(1.5, kE, 1.0),    BarrierSpec::hermite(2, 2.0, 10.0, 1.0),
        BarrierSpec::two_sided_constant(1.0, -1.0, 1.0), BarrierSpec::two_sided_curved(1.0, -1.0, 0.5, 1.0),
    };
    for (const auto& spec : specs) {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double t = spec.horizon() * (0.1 + 0.85 * i / 19.0);
            const double fd = (sigma_cdf(spec, t + h) - sigma_cdf(spec, t - h)) / (2.0 * h);
            worst = std::max(worst, rel(fd, sigma_pdf(spec, t)));
        }
        out.push_back(check("pdf-vs-cdf/" + label(spec), worst, 1e-5));
    }
    const auto inverted = BarrierSpec::time_inverted(BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0));
    double worst_inv = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double t = 1.1 + 3.0 * i / 19.0;
        const double fd = (hitting_cdf_inverted(inverted, t + h) - hitting_cdf_inverted(inverted, t - h)) / (2.0 * h);
        worst_inv = std::max(worst_inv, rel(fd, hitting_pdf_inverted_explicit(inverted, t)));
    }
    out.push_back(check("pdf-vs-cdf/" + label(inverted), worst_inv, 1e-5));

    const auto images = BarrierSpec::images_lambert(1.0, 2.0, 1.0);
    const auto mu = image_measure(images);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double t = 0.1 + 0.85 * i / 19.0;
        const double fd = (*images_crossing(images, mu, t + h).probability - *images_crossing(images, mu, t - h).probability) / (2.0 * h);
        worst = std::max(worst, rel(fd, images_hitting_pdf(images, mu, t)));
    }
    out.push_back(check("pdf-vs-cdf/" + label(images), worst, 1e-5));
}

void mirrored_checks(std::vector<CheckResult>& out) {
    const double a = 1.0;
    const double b = kE;
    const auto mu = image_measure(BarrierSpec::log_remaining(a, b, 1.0));
    const auto g_star = log_remaining_mirrored(a, b, 1.0);
    const IdentityReport rep = verify_barrier_identity(mu, g_star, remaining_time_grid(1.0, 1000));
    out.push_back(check("mirrored/identity", rep.max_abs_deviation, 1e-9, "reflected log-remaining barrier"));
    out.push_back(check("mirrored/bounded", rep.bound_growth, kBoundGrowthLimit, "reflected log-remaining barrier"));
    const CrossingResult r = crossing_prob_via_measure(g_star, mu);
    out.push_back({"mirrored/formula-accepted", r.conditions_met, r.conditions_met ? 1.0 : 0.0, 1.0,
                   r.conditions_met ? "formula applied" : "formula refused"});
}

void mc_checks(std::vector<CheckResult>& out, const McConfig& cfg) {
    const BarrierSpec specs[] = {
        BarrierSpec::linear(1.0, 0.0, 1.0),
        BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0),
        BarrierSpec::log_remaining(1.5, kE, 1.0),
        BarrierSpec::hermite(2, 3.0, 10.0, 1.0),
        BarrierSpec::time_inverted(BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0)),
        BarrierSpec::two_sided_constant(1.0, -1.0, 1.0),
        BarrierSpec::two_sided_curved(1.0, -1.0, 0.5, 1.0),
        BarrierSpec::images_lambert(1.0, 2.0, 1.0),
    };
    for (const auto& spec : specs) {
        const double analytic = *crossing_prob(spec).probability;
        const McEstimate mc = mc_crossing(spec, cfg);
        std::ostringstream os;
        os.precision(17);
        os << "analytic=" << analytic << " mc=" << mc.estimate << " se=" << mc.std_error;
        out.push_back(check("mc/" + label(spec), std::abs(analytic - mc.estimate),
                            std::max(3.0 * mc.std_error, 5e-3), os.str()));
    }
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
    std::vector<CheckResult> out;
    identity_checks(out);
    exact_checks(out);
    derivative_checks(out);
    if (opts.mirrored) mirrored_checks(out);
    if (opts.include_mc) mc_checks(out, opts.mc);
    return out;
}

}  // namespace bcross
