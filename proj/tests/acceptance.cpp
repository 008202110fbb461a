// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bcross/analytics.hpp"
#include "bcross/montecarlo.hpp"
#include "bcross/special_fns.hpp"

using namespace bcross;

namespace {

constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string summary;
};

std::string fmt(const char* f, double x) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

void detail(const std::string& line) { std::printf("    %s\n", line.c_str()); }

// ---------------------------------------------------------------------------

Outcome identity_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    const BarrierSpec specs[] = {
        BarrierSpec::linear(1.0, 0.5, 1.0),
        BarrierSpec::sqrt_remaining(1.0, 0.5, 1.0),
        BarrierSpec::log_remaining(1.5, kE, 1.0),
        BarrierSpec::hermite(1, 1.5, 2.0, 1.0),
        BarrierSpec::hermite(2, 2.0, 10.0, 1.0),
        BarrierSpec::hermite(3, 3.0, 30.0, 1.0),
    };
    const auto grid = remaining_time_grid(1.0, 1000);
    double worst = 0.0;
    for (const auto& spec : specs) {
        const double dev = verify_barrier_identity(image_measure(spec), barrier_function(spec), grid).max_abs_deviation;
        detail(std::string(family_name(spec.family())) + fmt(" identity deviation %.3g", dev));
        worst = std::max(worst, dev);
    }
    const auto images = BarrierSpec::images_lambert(1.0, 2.0, 1.0);
    const double img = images_condition(images, image_measure(images), 1000).max_abs_deviation;
    detail(fmt("images condition deviation %.3g", img));
    worst = std::max(worst, img);
    const double secs = seconds_since(t0);
    return {worst < 1e-9 && secs < 5.0, fmt("max deviation %.3g", worst) + fmt(" (< 1e-9), %.2f s", secs)};
}

Outcome exact_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;

    double refl = 0.0;
    for (double a : {0.1, 0.5, 1.0, 2.0, 3.5}) {
        for (double horizon : {0.25, 1.0, 4.0}) {
            const double p = *crossing_prob(BarrierSpec::sqrt_remaining(a, 0.0, horizon)).probability;
            refl = std::max(refl, std::abs(p - 2.0 * norm_cdf(-a / std::sqrt(horizon))));
        }
    }
    detail(fmt("reflection max error %.3g (tol 1e-14)", refl));
    pass = pass && refl < 1e-14;

    double arcsine = 0.0;
    for (const auto& spec : {BarrierSpec::linear(0.0, 0.0, 1.0), BarrierSpec::sqrt_remaining(0.0, 0.0, 1.0)}) {
        for (int i = 1; i <= 99; ++i) {
            const double t = i / 100.0;
            arcsine = std::max(arcsine, rel(lambda_pdf(spec, t), 1.0 / (kPi * std::sqrt(t * (1.0 - t)))));
        }
    }
    detail(fmt("arcsine max relative error %.3g (tol 1e-13)", arcsine));
    pass = pass && arcsine < 1e-13;

    double inversion = 0.0;
    double involution = 0.0;
    for (const auto& base : {BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0), BarrierSpec::sqrt_remaining(0.5, 2.0, 2.0),
                             BarrierSpec::linear(1.0, 0.3, 1.0), BarrierSpec::log_remaining(1.5, kE, 1.0)}) {
        inversion = std::max(inversion, std::abs(*crossing_prob(time_invert(base)).probability -
                                                 *crossing_prob(base).probability));
        const auto twice = time_invert(time_invert(base));
        for (int i = 0; i <= 100; ++i) {
            const double t = base.horizon() * i / 100.0;
            involution = std::max(involution, std::abs(barrier_eval(twice, t) - barrier_eval(base, t)));
        }
    }
    detail(fmt("time-inversion crossing equality error %.3g (tol 1e-14)", inversion));
    detail(fmt("double inversion error %.3g (tol 1e-14)", involution));
    pass = pass && inversion < 1e-14 && involution < 1e-14;

    bool symmetric = true;
    const auto curved = BarrierSpec::two_sided_curved(1.0, -1.0, 0.5, 1.0);
    for (int i = 0; i <= 1000; ++i) {
        const Band b = band_eval(curved, i / 1000.0);
        symmetric = symmetric && (b.upper + b.lower == 0.0);
    }
    detail(std::string("curved band g0 + g1 = a + b exactly: ") + (symmetric ? "yes" : "no"));
    pass = pass && symmetric;

    const double secs = seconds_since(t0);
    return {pass && secs < 1.0, fmt("all exact identities within tolerance, %.3f s", secs)};
}

Outcome derivative_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr double h = 1e-5;
    double worst = 0.0;
    auto run = [&](const std::string& name, double lo, double hi, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& pdf) {
        double w = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double t = lo + (hi - lo) * i / 19.0;
            w = std::max(w, rel((cdf(t + h) - cdf(t - h)) / (2.0 * h), pdf(t)));
        }
        detail(name + fmt(" max relative error %.3g", w));
        worst = std::max(worst, w);
    };
    for (const auto& spec : {BarrierSpec::linear(1.0, 0.5, 1.0), BarrierSpec::sqrt_remaining(1.0, 0.5, 1.0),
                             BarrierSpec::log_remaining(1.5, kE, 1.0), BarrierSpec::hermite(2, 2.0, 10.0, 1.0),
                             BarrierSpec::two_sided_constant(1.0, -1.0, 1.0),
                             BarrierSpec::two_sided_curved(1.0, -1.0, 0.5, 1.0)}) {
        run(std::string("sigma ") + std::string(family_name(spec.family())), 0.1, 0.95,
            [&](double t) { return sigma_cdf(spec, t); }, [&](double t) { return sigma_pdf(spec, t); });
    }
    for (const auto& spec : {BarrierSpec::linear(1.0, 0.5, 1.0), BarrierSpec::sqrt_remaining(1.0, 0.5, 1.0)}) {
        run(std::string("lambda ") + std::string(family_name(spec.family())), 0.1, 0.95,
            [&](double t) { return lambda_cdf(spec, t); }, [&](double t) { return lambda_pdf(spec, t); });
    }
    const auto inv = BarrierSpec::time_inverted(BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0));
    run("hitting time-inverted", 1.1, 4.0, [&](double t) { return hitting_cdf_inverted(inv, t); },
        [&](double t) { return hitting_pdf_inverted_explicit(inv, t); });
    const auto images = BarrierSpec::images_lambert(1.0, 2.0, 1.0);
    const auto mu = image_measure(images);
    run("hitting images", 0.1, 0.95, [&](double t) { return *images_crossing(images, mu, t).probability; },
        [&](double t) { return images_hitting_pdf(images, mu, t); });
    const double secs = seconds_since(t0);
    return {worst < 1e-5 && secs < 10.0, fmt("max relative error %.3g", worst) + fmt(" (< 1e-5), %.2f s", secs)};
}

// Survival in (b, a) from u by the eigenfunction expansion of the killed heat
// equation, independent of the image-measure code.
double band_exit_sine_series(double a, double b, double u, double horizon) {
    const double w = a - b;
    double stay = 0.0;
    for (int n = 1; n <= 2001; n += 2) {
        const double k = n * kPi / w;
        stay += 4.0 / (n * kPi) * std::sin(k * (u - b)) * std::exp(-0.5 * k * k * horizon);
    }
    return 1.0 - stay;
}

Outcome series_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    const double lib = *crossing_prob(BarrierSpec::two_sided_constant(1.0, -1.0, 1.0)).probability;
    const double oracle = band_exit_sine_series(1.0, -1.0, 0.0, 1.0);
    const double err = std::abs(lib - oracle);
    detail(fmt("library %.15f", lib) + fmt(", sine series %.15f", oracle));
    const double secs = seconds_since(t0);
    return {err < 1e-10 && secs < 1.0, fmt("difference %.3g (< 1e-10)", err) + fmt(", %.3f s", secs)};
}

Outcome negative_suite() {
    const double a = 1.0, b = kE;
    const auto mu = image_measure(BarrierSpec::log_remaining(a, b, 1.0));
    const auto g_star = log_remaining_mirrored(a, b, 1.0);
    const IdentityReport rep = verify_barrier_identity(mu, g_star, remaining_time_grid(1.0, 1000));
    const CrossingResult r = crossing_prob_via_measure(g_star, mu);
    detail(fmt("identity deviation %.3g", rep.max_abs_deviation) + fmt(", bound growth %.4g", rep.bound_growth));
    for (const auto& c : r.condition_report) detail(std::string(c.satisfied ? "holds:    " : "violated: ") + c.text);
    const bool identity_ok = rep.max_abs_deviation < 1e-9;
    const bool bounded_fails = !rep.bounded;
    const bool refused = !r.conditions_met && !r.probability;
    return {identity_ok && bounded_fails && refused,
            std::string("identity ") + (identity_ok ? "passes" : "fails") + ", boundedness " +
                (bounded_fails ? "fails" : "passes") + ", formula " + (refused ? "refused" : "applied")};
}

// ---------------------------------------------------------------------------
// Monte Carlo. The report text is built only from simulation output and the
// configuration, so two runs can be compared byte for byte.

struct McSuite {
    std::string report;
    bool agreement = true;
    bool last_exit = true;
    bool fortet = true;
};

McConfig mc_config(int threads) {
    McConfig c;
    c.paths = 1000000;
    c.steps = 4096;
    c.seed = 20240601;
    c.bridge_correction = true;
    c.threads = threads;
    return c;
}

McSuite run_mc_suite(int threads, bool verbose) {
    McSuite s;
    const McConfig cfg = mc_config(threads);
    auto note = [&](const std::string& line) {
        s.report += line + '\n';
        if (verbose) detail(line);
    };

    struct Config {
        BarrierSpec spec;
        const char* label;
    };
    const Config configs[] = {
        {BarrierSpec::linear(1.0, 0.0, 1.0), "linear a=1 b=0"},
        {BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0), "sqrt-remaining a=1 b=1"},
        {BarrierSpec::log_remaining(1.5, kE, 1.0), "log-remaining a=1.5 b=e"},
        {BarrierSpec::hermite(2, 2.0, 10.0, 1.0), "hermite n=2 a=2 b=10"},
        {BarrierSpec::hermite(2, 3.0, 10.0, 1.0), "hermite n=2 a=3 b=10"},
        {BarrierSpec::time_inverted(BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0)), "time-inverted sqrt-remaining a=1 b=1"},
        {BarrierSpec::two_sided_constant(1.0, -1.0, 1.0), "two-sided-constant a=1 b=-1"},
        {BarrierSpec::two_sided_curved(1.0, -1.0, 0.5, 1.0), "two-sided-curved a=1 b=-1 c=0.5"},
        {BarrierSpec::images_lambert(1.0, 2.0, 1.0), "images-lambert a=1 b=2"},
    };
    for (const auto& c : configs) {
        const McEstimate e = mc_crossing(c.spec, cfg);
        const CrossingResult r = crossing_prob(c.spec);
        std::string line = std::string(c.label) + fmt(": mc %.17g", e.estimate) + fmt(" se %.17g", e.std_error);
        if (r.probability) {
            const double diff = std::abs(*r.probability - e.estimate);
            const double tol = std::max(3.0 * e.std_error, 5e-3);
            line += fmt(" analytic %.17g", *r.probability) + fmt(" |diff| %.3g", diff) + fmt(" tol %.3g", tol);
            s.agreement = s.agreement && diff < tol;
        } else {
            // g(0) < 0: the path starts above the barrier and crosses at once
            const double g0 = barrier_eval(c.spec, 0.0);
            line += fmt(" closed form refused (g(0) = %.6f)", g0);
            s.agreement = s.agreement && g0 < 0.0 && e.estimate == 1.0;
            line += e.estimate == 1.0 ? "; mc = 1 as expected" : "; mc != 1";
        }
        note(line);
    }

    const std::vector<double> times{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    for (const auto& c : {configs[0], configs[1], configs[2]}) {
        const McLastExit le = mc_last_exit(c.spec, cfg, times);
        const bool has_lambda = c.spec.family() != Family::LogRemaining;
        double zmax_sigma = 0.0, zmax_lambda = 0.0;
        for (std::size_t i = 0; i < le.times.size(); ++i) {
            const double zs = (le.sigma_cdf[i] - sigma_cdf(c.spec, le.times[i])) / le.sigma_se[i];
            zmax_sigma = std::max(zmax_sigma, std::abs(zs));
            if (has_lambda) {
                const double zl = (le.lambda_cdf[i] - lambda_cdf(c.spec, le.times[i])) / le.lambda_se[i];
                zmax_lambda = std::max(zmax_lambda, std::abs(zl));
            }
            note(std::string(c.label) + fmt(" t=%.3f", le.times[i]) + fmt(" sigma %.17g", le.sigma_cdf[i]) +
                 (has_lambda ? fmt(" lambda %.17g", le.lambda_cdf[i]) : std::string()));
        }
        note(std::string(c.label) + fmt(": max |z| sigma %.3f", zmax_sigma) +
             (has_lambda ? fmt(", lambda %.3f", zmax_lambda) : std::string()));
        s.last_exit = s.last_exit && zmax_sigma < 3.0 && zmax_lambda < 3.0;
    }

    struct Triple {
        BarrierSpec spec;
        double u, v;
        const char* label;
    };
    const Triple triples[] = {
        {BarrierSpec::linear(1.0, 0.0, 1.0), 0.0, 1.5, "linear a=1 b=0"},
        {BarrierSpec::sqrt_remaining(1.0, 0.5, 1.0), 0.0, 2.0, "sqrt-remaining a=1 b=0.5"},
        {BarrierSpec::log_remaining(1.5, kE, 1.0), 0.0, 2.0, "log-remaining a=1.5 b=e"},
    };
    for (const auto& tr : triples) {
        const FortetCheck f = mc_fortet_check(tr.spec, tr.v, tr.u, cfg);
        const double z = (f.rhs.estimate - f.lhs) / f.rhs.std_error;
        note(std::string("fortet ") + tr.label + fmt(" u=%g", tr.u) + fmt(" v=%g", tr.v) + fmt(": lhs %.17g", f.lhs) +
             fmt(" rhs %.17g", f.rhs.estimate) + fmt(" se %.17g", f.rhs.std_error) + fmt(" z %.3f", z));
        s.fortet = s.fortet && std::abs(z) < 3.0;
    }
    return s;
}

int report(int number, const Outcome& o) {
    std::printf("CRITERION %d %s: %s\n", number, o.pass ? "PASS" : "FAIL", o.summary.c_str());
    std::fflush(stdout);
    return o.pass ? 0 : 1;
}

}  // namespace

int main() {
    int failures = 0;
    failures += report(1, identity_suite());
    failures += report(2, exact_suite());
    failures += report(3, derivative_suite());

    const auto t0 = std::chrono::steady_clock::now();
    const McSuite first = run_mc_suite(0, true);
    const double mc_secs = seconds_since(t0);
    failures += report(4, {first.agreement && first.last_exit,
                           std::string("crossing agreement ") + (first.agreement ? "ok" : "FAILED") +
                               ", last-exit CDFs " + (first.last_exit ? "ok" : "FAILED") +
                               fmt(", full MC suite %.0f s", mc_secs)});
    failures += report(5, series_suite());
    failures += report(6, {first.fortet, std::string("three Fortet triples ") +
                                             (first.fortet ? "within 3 SE" : "NOT within 3 SE")});
    failures += report(7, negative_suite());

    // second run on a different thread count
    const McSuite second = run_mc_suite(2, false);
    const bool same = first.report == second.report;
    failures += report(8, {same, same ? fmt("repeat run byte-identical (%.0f report bytes)", static_cast<double>(first.report.size()))
                                      : std::string("repeat run differs")});
    return failures == 0 ? 0 : 1;
}
