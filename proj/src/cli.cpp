#include "bcross/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bcross/analytics.hpp"
#include "bcross/errors.hpp"
#include "bcross/montecarlo.hpp"
#include "bcross/spec_json.hpp"
#include "bcross/verify.hpp"
#include "json.hpp"

namespace bcross {

namespace {

using nlohmann::json;

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string g17(double x) { return fmt("%.17g", x); }

struct SpecArgs {
    std::string spec_file;
    std::string family;
    std::string base;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    unsigned n = 0;
    double horizon = 1.0;
    CLI::Option* a_opt = nullptr;
    CLI::Option* b_opt = nullptr;
    CLI::Option* c_opt = nullptr;
    CLI::Option* n_opt = nullptr;

    void attach(CLI::App* app) {
        auto* file = app->add_option("--spec", spec_file, "JSON barrier spec file");
        auto* fam = app->add_option("--family", family, "barrier family")->excludes(file);
        app->add_option("--base", base, "base family of a time-inverted barrier")->excludes(file);
        a_opt = app->add_option("--a", a)->excludes(file);
        b_opt = app->add_option("--b", b)->excludes(file);
        c_opt = app->add_option("--c", c, "two-sided-curved constant")->excludes(file);
        n_opt = app->add_option("--n", n, "hermite order")->excludes(file);
        app->add_option("--T", horizon, "horizon")->excludes(file);
        fam->excludes(file);
    }

    BarrierSpec build() const {
        if (!spec_file.empty()) return barrier_spec_from_file(spec_file);
        if (family.empty()) throw CLI::RequiredError("--family or --spec");
        const Family fam = family_from_name_or_usage(family);
        if (fam == Family::TimeInverted) {
            if (base.empty()) throw CLI::RequiredError("--base (time-inverted)");
            return time_invert(make(family_from_name_or_usage(base)));
        }
        return make(fam);
    }

private:
    static Family family_from_name_or_usage(const std::string& name) {
        try {
            return family_from_name(name);
        } catch (const DomainError& e) {
            throw CLI::ValidationError("--family", e.what());
        }
    }

    void need(CLI::Option* opt, const char* name) const {
        if (opt->count() == 0) throw CLI::RequiredError(name);
    }

    BarrierSpec make(Family fam) const {
        need(a_opt, "--a");
        need(b_opt, "--b");
        switch (fam) {
            case Family::Linear: return BarrierSpec::linear(a, b, horizon);
            case Family::SqrtRemaining: return BarrierSpec::sqrt_remaining(a, b, horizon);
            case Family::LogRemaining: return BarrierSpec::log_remaining(a, b, horizon);
            case Family::HermiteFamily:
                need(n_opt, "--n");
                return BarrierSpec::hermite(n, a, b, horizon);
            case Family::TwoSidedConstant: return BarrierSpec::two_sided_constant(a, b, horizon);
            case Family::TwoSidedCurved:
                need(c_opt, "--c");
                return BarrierSpec::two_sided_curved(a, b, c, horizon);
            case Family::ImagesLambert: return BarrierSpec::images_lambert(a, b, horizon);
            case Family::TimeInverted: break;
        }
        throw CLI::ValidationError("--base", "time-inverted cannot be nested");
    }
};

struct McArgs {
    McConfig cfg;
    std::string engine = "openmp";

    void attach(CLI::App* app, std::uint64_t default_paths) {
        cfg.paths = default_paths;
        app->add_option("--paths", cfg.paths)->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--steps", cfg.steps)->check(CLI::Range(2u, 1u << 30))->capture_default_str();
        app->add_option("--seed", cfg.seed)->capture_default_str();
        app->add_flag("--bridge,!--no-bridge", cfg.bridge_correction, "Brownian-bridge crossing correction");
        app->add_option("--threads", cfg.threads, "0 = BCROSS_THREADS or the OpenMP default")->check(CLI::NonNegativeNumber);
        app->add_option("--engine", engine)->check(CLI::IsMember({"openmp", "serial"}))->capture_default_str();
    }

    McConfig config() const {
        McConfig c = cfg;
        c.engine = engine == "serial" ? McEngine::serial : McEngine::openmp;
        return c;
    }
};

json config_json(const McConfig& c) {
    return {{"paths", c.paths},
            {"steps", c.steps},
            {"seed", c.seed},
            {"bridge", c.bridge_correction},
            {"start", c.start},
            {"inverted_max", c.inverted_max}};
}

std::string config_text(const McConfig& c) {
    return "paths=" + std::to_string(c.paths) + " steps=" + std::to_string(c.steps) +
           " seed=" + std::to_string(c.seed) + " bridge=" + (c.bridge_correction ? "on" : "off");
}

json estimate_json(const McEstimate& e) {
    return {{"estimate", e.estimate},
            {"std_error", e.std_error},
            {"ci95", {e.ci_low, e.ci_high}},
            {"paths_used", e.paths_used}};
}

json conditions_json(const CrossingResult& r) {
    json arr = json::array();
    for (const auto& c : r.condition_report) arr.push_back({{"condition", c.text}, {"satisfied", c.satisfied}});
    return arr;
}

// ---------------------------------------------------------------------------

int run_prob(const BarrierSpec& spec, double start, bool as_json, std::ostream& out) {
    const CrossingResult r = crossing_prob(spec, start);
    if (as_json) {
        json j = {{"spec", to_json(spec)},
                  {"start", start},
                  {"conditions_met", r.conditions_met},
                  {"formula", r.formula},
                  {"conditions", conditions_json(r)}};
        j["probability"] = r.probability ? json(*r.probability) : json(nullptr);
        out << j.dump(2) << '\n';
    } else {
        if (r.probability) out << "probability " << g17(*r.probability) << '\n';
        out << "formula " << r.formula << '\n';
        for (const auto& c : r.condition_report)
            out << (c.satisfied ? "  holds     " : "  VIOLATED  ") << c.text << '\n';
    }
    return r.conditions_met ? kExitOk : kExitCondition;
}

void write_csv(const DensityCurve& curve, std::ostream& os) {
    os << "t,cdf,pdf\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        os << g17(curve.grid[i]) << ',' << g17(curve.cdf[i]) << ',' << g17(curve.pdf[i]) << '\n';
}

int run_density(const BarrierSpec& spec, const std::string& kind, const GridOptions& grid, const std::string& out_file,
                bool as_json, std::ostream& out, std::ostream& err) {
    const DensityCurve curve = tabulate(spec, density_kind_from_name(kind), grid);
    if (!out_file.empty()) {
        std::ofstream f(out_file);
        if (!f) {
            err << "error: cannot open " << out_file << " for writing\n";
            return kExitUsage;
        }
        write_csv(curve, f);
    }
    if (as_json) {
        json j = {{"spec", to_json(spec)}, {"kind", kind}, {"t", curve.grid}, {"cdf", curve.cdf}, {"pdf", curve.pdf}};
        out << j.dump() << '\n';
    } else if (out_file.empty()) {
        write_csv(curve, out);
    } else {
        out << "wrote " << curve.grid.size() << " rows to " << out_file << '\n';
    }
    return kExitOk;
}

struct McMode {
    bool fortet = false;
    double v = 0.0;
    std::optional<double> u;
    bool last_exit = false;
    std::vector<double> times;
    double start = 0.0;
};

int run_mc(const BarrierSpec& spec, const McConfig& cfg_in, const McMode& mode, bool as_json, std::ostream& out) {
    McConfig cfg = cfg_in;
    cfg.start = mode.start;
    json j = {{"spec", to_json(spec)}, {"config", config_json(cfg)}};

    if (mode.fortet) {
        const double u = mode.u.value_or(mode.start);
        const FortetCheck f = mc_fortet_check(spec, mode.v, u, cfg);
        const double z = (f.rhs.estimate - f.lhs) / f.rhs.std_error;
        if (as_json) {
            j["fortet"] = {{"u", u}, {"v", mode.v}, {"lhs", f.lhs}, {"rhs", estimate_json(f.rhs)}, {"z", z}};
            out << j.dump(2) << '\n';
        } else {
            out << "fortet u=" << g17(u) << " v=" << g17(mode.v) << '\n'
                << "  lhs " << g17(f.lhs) << '\n'
                << "  rhs " << g17(f.rhs.estimate) << " se " << g17(f.rhs.std_error) << '\n'
                << "  z   " << fmt("%.4f", z) << '\n'
                << config_text(cfg) << '\n';
        }
        return kExitOk;
    }

    if (mode.last_exit) {
        std::vector<double> times = mode.times;
        if (times.empty())
            for (int i = 1; i <= 9; ++i) times.push_back(spec.horizon() * i / 10.0);
        const McLastExit le = mc_last_exit(spec, cfg, times);
        const bool has_lambda = spec.family() == Family::Linear || spec.family() == Family::SqrtRemaining;
        json rows = json::array();
        if (!as_json) out << "t sigma_mc sigma_se sigma_exact" << (has_lambda ? " lambda_mc lambda_se lambda_exact" : "") << '\n';
        for (std::size_t i = 0; i < le.times.size(); ++i) {
            const double t = le.times[i];
            const double s_exact = sigma_cdf(spec, t);
            json row = {{"t", t}, {"sigma_cdf", le.sigma_cdf[i]}, {"sigma_se", le.sigma_se[i]}, {"sigma_exact", s_exact}};
            std::string line = g17(t) + ' ' + g17(le.sigma_cdf[i]) + ' ' + g17(le.sigma_se[i]) + ' ' + g17(s_exact);
            if (has_lambda) {
                const double l_exact = lambda_cdf(spec, t);
                row["lambda_cdf"] = le.lambda_cdf[i];
                row["lambda_se"] = le.lambda_se[i];
                row["lambda_exact"] = l_exact;
                line += ' ' + g17(le.lambda_cdf[i]) + ' ' + g17(le.lambda_se[i]) + ' ' + g17(l_exact);
            }
            rows.push_back(row);
            if (!as_json) out << line << '\n';
        }
        if (as_json) {
            j["last_exit"] = rows;
            out << j.dump(2) << '\n';
        } else {
            out << config_text(cfg) << '\n';
        }
        return kExitOk;
    }

    const McEstimate e = mc_crossing(spec, cfg);
    std::optional<double> analytic;
    try {
        analytic = crossing_prob(spec, mode.start).probability;
    } catch (const std::exception&) {
        // the estimate stands on its own when no closed form applies
    }
    if (as_json) {
        j["crossing"] = estimate_json(e);
        if (analytic) {
            j["analytic"] = *analytic;
            j["z"] = (e.estimate - *analytic) / e.std_error;
        }
        out << j.dump(2) << '\n';
    } else {
        out << "estimate " << g17(e.estimate) << '\n'
            << "std_error " << g17(e.std_error) << '\n'
            << "ci95 [" << g17(e.ci_low) << ", " << g17(e.ci_high) << "]\n";
        if (analytic)
            out << "analytic " << g17(*analytic) << '\n'
                << "z " << fmt("%.4f", (e.estimate - *analytic) / e.std_error) << '\n';
        out << config_text(cfg) << '\n';
    }
    return kExitOk;
}

int run_verify(const VerifyOptions& opts, bool as_json, std::ostream& out) {
    const auto checks = run_verification(opts);
    bool all = true;
    json arr = json::array();
    for (const auto& c : checks) {
        all = all && c.passed;
        if (as_json) {
            arr.push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"value", c.value},
                           {"tolerance", c.tolerance},
                           {"detail", c.detail}});
        } else {
            out << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << fmt("%.6g", c.value)
                << " tol=" << fmt("%.3g", c.tolerance);
            if (!c.detail.empty()) out << "  " << c.detail;
            out << '\n';
        }
    }
    if (as_json) {
        out << json{{"passed", all}, {"checks", arr}}.dump(2) << '\n';
    } else {
        out << (all ? "all checks passed" : "verification FAILED") << '\n';
    }
    return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact and simulated boundary-crossing probabilities for Brownian motion", "bcross"};
    app.require_subcommand(1, 1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    SpecArgs prob_spec, dens_spec, mc_spec;
    double prob_start = 0.0;
    auto* prob = app.add_subcommand("prob", "crossing probability from the closed form");
    prob_spec.attach(prob);
    prob->add_option("--start", prob_start, "start point u");
    prob->add_flag("--json", as_json);

    std::string kind = "sigma";
    GridOptions grid;
    std::string out_file;
    auto* dens = app.add_subcommand("density", "tabulate t,cdf,pdf on a grid");
    dens_spec.attach(dens);
    dens->add_option("--kind", kind)->check(CLI::IsMember({"sigma", "lambda", "hitting-inverted", "hitting-images"}))
        ->capture_default_str();
    dens->add_option("--grid", grid.points, "grid points")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
        ->capture_default_str();
    dens->add_option("--clip", grid.clip, "endpoint clip as a fraction of T")->check(CLI::Range(0.0, 0.5))
        ->capture_default_str();
    dens->add_option("--t-max", grid.inverted_max, "hitting-inverted grid ends at t-max * T")->capture_default_str();
    dens->add_option("--out", out_file, "CSV output file");
    dens->add_flag("--json", as_json);

    McArgs mc_args;
    McMode mode;
    auto* mc = app.add_subcommand("mc", "Monte Carlo estimates");
    mc_spec.attach(mc);
    mc_args.attach(mc, 100000);
    mc->add_option("--start", mode.start, "start point u");
    mc->add_option("--t-max", mc_args.cfg.inverted_max, "time-inverted paths run to t-max * T")->capture_default_str();
    auto* fortet = mc->add_flag("--fortet", mode.fortet, "Fortet equation check");
    auto* v_opt = mc->add_option("--v", mode.v, "Fortet target level")->needs(fortet);
    mc->add_option("--u", mode.u, "Fortet start point (defaults to --start)")->needs(fortet);
    auto* last = mc->add_flag("--last-exit", mode.last_exit, "empirical sigma/lambda CDFs")->excludes(fortet);
    mc->add_option("--times", mode.times, "times for --last-exit")->delimiter(',')->needs(last);
    mc->add_flag("--json", as_json);

    VerifyOptions vopts;
    McArgs verify_mc;
    auto* verify = app.add_subcommand("verify", "identity, closed-form and finite-difference checks");
    verify->add_flag("--include-mc", vopts.include_mc, "add Monte Carlo agreement checks");
    verify->add_flag("--mirrored", vopts.mirrored, "add the reflected log-remaining barrier (expected to fail)");
    verify_mc.attach(verify, 1000000);
    verify->add_flag("--json", as_json);

    try {
        app.parse(argc, argv);
        if (fortet->count() && v_opt->count() == 0) throw CLI::RequiredError("--v");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*prob) return run_prob(prob_spec.build(), prob_start, as_json, out);
        if (*dens) return run_density(dens_spec.build(), kind, grid, out_file, as_json, out, err);
        if (*mc) return run_mc(mc_spec.build(), mc_args.config(), mode, as_json, out);
        vopts.mc = verify_mc.config();
        return run_verify(vopts, as_json, out);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    } catch (const SpecError& e) {
        err << "spec error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitCondition;
    } catch (const PreconditionError& e) {
        err << "condition violated: " << e.what() << '\n';
        return kExitCondition;
    }
}

}  // namespace bcross
