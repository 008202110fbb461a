#include "bcross/montecarlo.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>

#include "bcross/errors.hpp"
#include "bcross/random.hpp"
#include "bcross/special_fns.hpp"

namespace bcross {

namespace {

constexpr std::uint32_t kNormalStream = 0;
constexpr std::uint32_t kBridgeStream = 1;
// exp(-25) is below the resolution that matters for any estimate here.
constexpr double kBridgeCutoff = 25.0;

struct Neumaier {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) noexcept {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const noexcept { return sum + comp; }
};

struct SimGrid {
    std::vector<double> t;
    std::vector<double> upper;
    std::vector<double> lower;  // empty for one-sided barriers
    std::vector<double> sd;     // sd[k] = sqrt(t[k] - t[k-1])
    std::vector<double> two_over_dt;
    double horizon = 0.0;
    double initial_sd = 0.0;  // W_T spread for time-inverted barriers
    bool two_sided = false;
};

SimGrid build_grid(const BarrierSpec& spec, const McConfig& cfg) {
    SimGrid g;
    const std::uint32_t n = cfg.steps;
    const double horizon = spec.horizon();
    g.horizon = horizon;
    g.t.resize(n + 1);
    if (spec.family() == Family::TimeInverted) {
        const double end = cfg.inverted_max * horizon;
        for (std::uint32_t k = 0; k <= n; ++k) {
            const double s = static_cast<double>(k) / n;
            g.t[k] = horizon + (end - horizon) * s * s;
        }
        g.t[n] = end;
        g.initial_sd = std::sqrt(horizon);
    } else {
        for (std::uint32_t k = 0; k <= n; ++k) g.t[k] = horizon * (static_cast<double>(k) / n);
        g.t[n] = horizon;
    }
    g.upper.resize(n + 1);
    g.two_sided = spec.two_sided();
    if (g.two_sided) {
        g.lower.resize(n + 1);
        for (std::uint32_t k = 0; k <= n; ++k) {
            const Band b = band_eval(spec, g.t[k]);
            g.upper[k] = b.upper;
            g.lower[k] = b.lower;
        }
    } else {
        for (std::uint32_t k = 0; k <= n; ++k) g.upper[k] = barrier_eval(spec, g.t[k]);
    }
    g.sd.assign(n + 1, 0.0);
    g.two_over_dt.assign(n + 1, 0.0);
    for (std::uint32_t k = 1; k <= n; ++k) {
        const double dt = g.t[k] - g.t[k - 1];
        g.sd[k] = std::sqrt(dt);
        g.two_over_dt[k] = 2.0 / dt;
    }
    return g;
}

struct PathRngs {
    PathRng normals;
    PathRng bridge;

    PathRngs(std::uint64_t seed, std::uint64_t path) : normals(seed, kNormalStream, path), bridge(seed, kBridgeStream, path) {}
};

double initial_value(const SimGrid& g, const McConfig& cfg, PathRng& normals) {
    return g.initial_sd > 0.0 ? cfg.start + g.initial_sd * normals.normal() : cfg.start;
}

/// Index of the interval (t[k-1], t[k]] in which the path first meets the
/// barrier, 0 if it starts on or beyond it, -1 if it never does.
template <bool TwoSided>
std::int64_t first_crossing(const SimGrid& g, const McConfig& cfg, PathRngs& rng) {
    double x = initial_value(g, cfg, rng.normals);
    if (x >= g.upper[0]) return 0;
    if constexpr (TwoSided) {
        if (x <= g.lower[0]) return 0;
    }
    const std::size_t n = g.t.size() - 1;
    for (std::size_t k = 1; k <= n; ++k) {
        const double xn = x + g.sd[k] * rng.normals.normal();
        const double d2 = g.upper[k] - xn;
        if (d2 <= 0.0) return static_cast<std::int64_t>(k);
        double l2 = 0.0;
        if constexpr (TwoSided) {
            l2 = xn - g.lower[k];
            if (l2 <= 0.0) return static_cast<std::int64_t>(k);
        }
        if (cfg.bridge_correction) {
            const double e_up = (g.upper[k - 1] - x) * d2 * g.two_over_dt[k];
            double e_low = std::numeric_limits<double>::infinity();
            if constexpr (TwoSided) e_low = (x - g.lower[k - 1]) * l2 * g.two_over_dt[k];
            if (e_up < kBridgeCutoff || e_low < kBridgeCutoff) {
                const double p_up = e_up < kBridgeCutoff ? std::exp(-e_up) : 0.0;
                const double p_low = e_low < kBridgeCutoff ? std::exp(-e_low) : 0.0;
                const double p = p_up + p_low - p_up * p_low;
                if (rng.bridge.uniform53() < p) return static_cast<std::int64_t>(k);
            }
        }
        x = xn;
    }
    return -1;
}

std::int64_t simulate_crossing(const SimGrid& g, const McConfig& cfg, std::uint64_t path) {
    PathRngs rng(cfg.seed, path);
    return g.two_sided ? first_crossing<true>(g, cfg, rng) : first_crossing<false>(g, cfg, rng);
}

struct LastTouch {
    std::size_t interval;  // 0 when the path never meets the barrier
    bool below_at_end;
};

LastTouch last_touch(const SimGrid& g, const McConfig& cfg, std::uint64_t path) {
    PathRngs rng(cfg.seed, path);
    double x = cfg.start;
    std::size_t last = 0;
    const std::size_t n = g.t.size() - 1;
    for (std::size_t k = 1; k <= n; ++k) {
        const double xn = x + g.sd[k] * rng.normals.normal();
        const double prod = (g.upper[k - 1] - x) * (g.upper[k] - xn);
        if (prod <= 0.0) {
            last = k;
        } else if (cfg.bridge_correction) {
            const double e = prod * g.two_over_dt[k];
            if (e < kBridgeCutoff && rng.bridge.uniform53() < std::exp(-e)) last = k;
        }
        x = xn;
    }
    return {last, x <= g.upper[n]};
}

int env_threads() {
    const char* v = std::getenv("BCROSS_THREADS");
    if (v == nullptr || *v == '\0') return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) return 0;
    return static_cast<int>(n);
}

/// Runs body(first_path, path_count) for every block and returns the block
/// results in block order.
template <class Result, class Body>
std::vector<Result> run_blocks(const McConfig& cfg, Body body) {
    const std::uint64_t blocks = (cfg.paths + kMcBlockPaths - 1) / kMcBlockPaths;
    std::vector<Result> results(blocks);
    auto one = [&](std::uint64_t b) {
        const std::uint64_t first = b * kMcBlockPaths;
        const std::uint64_t count = std::min(kMcBlockPaths, cfg.paths - first);
        results[b] = body(first, count);
    };
    if (cfg.engine == McEngine::serial) {
        for (std::uint64_t b = 0; b < blocks; ++b) one(b);
        return results;
    }
    std::exception_ptr error;
    const auto nblocks = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(mc_thread_count(cfg))
    for (std::int64_t b = 0; b < nblocks; ++b) {
        try {
            one(static_cast<std::uint64_t>(b));
        } catch (...) {
#pragma omp critical(bcross_mc_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return results;
}

McEstimate proportion(std::uint64_t hits, const McConfig& cfg) {
    McEstimate e;
    e.config = cfg;
    e.paths_used = cfg.paths;
    const double n = static_cast<double>(cfg.paths);
    e.estimate = static_cast<double>(hits) / n;
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / n);
    e.ci_low = e.estimate - 1.96 * e.std_error;
    e.ci_high = e.estimate + 1.96 * e.std_error;
    return e;
}

void require_sigma_family(const BarrierSpec& spec, const char* what) {
    switch (spec.family()) {
        case Family::Linear:
        case Family::SqrtRemaining:
        case Family::LogRemaining:
        case Family::HermiteFamily:
            return;
        default:
            throw DomainError(std::string(what) + " needs a one-sided family on [0, T]");
    }
}

}  // namespace

void McConfig::validate() const {
    if (paths < 1) throw DomainError("Monte Carlo needs at least one path");
    if (steps < 2) throw DomainError("Monte Carlo needs at least two time steps");
    if (!(inverted_max > 1.0)) throw DomainError("inverted_max must exceed 1");
    if (!std::isfinite(start)) throw DomainError("start must be finite");
    if (threads < 0) throw DomainError("thread count must be non-negative");
}

int mc_thread_count(const McConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    const int env = env_threads();
    return env > 0 ? env : omp_get_max_threads();
}

McEstimate mc_crossing(const BarrierSpec& spec, const McConfig& cfg) {
    cfg.validate();
    const SimGrid grid = build_grid(spec, cfg);
    const auto blocks = run_blocks<std::uint64_t>(cfg, [&](std::uint64_t first, std::uint64_t count) {
        std::uint64_t hits = 0;
        for (std::uint64_t p = first; p < first + count; ++p) hits += simulate_crossing(grid, cfg, p) >= 0 ? 1 : 0;
        return hits;
    });
    std::uint64_t hits = 0;
    for (const auto h : blocks) hits += h;
    return proportion(hits, cfg);
}

McLastExit mc_last_exit(const BarrierSpec& spec, const McConfig& cfg, std::span<const double> times) {
    cfg.validate();
    require_sigma_family(spec, "last-exit simulation");
    const double horizon = spec.horizon();
    const SimGrid grid = build_grid(spec, cfg);
    std::vector<std::size_t> index(times.size());
    McLastExit out;
    out.config = cfg;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0 && times[i] <= horizon)) throw DomainError("last-exit times must lie in (0, T]");
        const double pos = std::round(times[i] / horizon * cfg.steps);
        index[i] = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(cfg.steps)));
        out.times.push_back(grid.t[index[i]]);
    }
    struct Counts {
        std::vector<std::uint64_t> sigma;
        std::vector<std::uint64_t> lambda;
    };
    const auto blocks = run_blocks<Counts>(cfg, [&](std::uint64_t first, std::uint64_t count) {
        Counts c{std::vector<std::uint64_t>(index.size(), 0), std::vector<std::uint64_t>(index.size(), 0)};
        for (std::uint64_t p = first; p < first + count; ++p) {
            const LastTouch lt = last_touch(grid, cfg, p);
            for (std::size_t i = 0; i < index.size(); ++i) {
                if (lt.interval <= index[i]) {
                    ++c.lambda[i];
                    if (lt.below_at_end) ++c.sigma[i];
                }
            }
        }
        return c;
    });
    std::vector<std::uint64_t> sigma(index.size(), 0);
    std::vector<std::uint64_t> lambda(index.size(), 0);
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < index.size(); ++i) {
            sigma[i] += b.sigma[i];
            lambda[i] += b.lambda[i];
        }
    }
    for (std::size_t i = 0; i < index.size(); ++i) {
        const McEstimate s = proportion(sigma[i], cfg);
        const McEstimate l = proportion(lambda[i], cfg);
        out.sigma_cdf.push_back(s.estimate);
        out.sigma_se.push_back(s.std_error);
        out.lambda_cdf.push_back(l.estimate);
        out.lambda_se.push_back(l.std_error);
    }
    return out;
}

FortetCheck mc_fortet_check(const BarrierSpec& spec, double v, double u, const McConfig& cfg_in) {
    require_sigma_family(spec, "Fortet check");
    McConfig cfg = cfg_in;
    cfg.start = u;
    cfg.validate();
    const double horizon = spec.horizon();
    if (!(v > barrier_eval(spec, horizon))) throw DomainError("Fortet check needs v > g(T)");
    if (!(u <= barrier_eval(spec, 0.0))) throw DomainError("Fortet check needs u <= g(0)");
    const SimGrid grid = build_grid(spec, cfg);
    FortetCheck out;
    out.lhs = norm_pdf((u - v) / std::sqrt(horizon)) / std::sqrt(horizon);
    struct Sums {
        Neumaier sum;
        Neumaier sq;
    };
    const auto blocks = run_blocks<Sums>(cfg, [&](std::uint64_t first, std::uint64_t count) {
        Sums s;
        for (std::uint64_t p = first; p < first + count; ++p) {
            const std::int64_t k = simulate_crossing(grid, cfg, p);
            if (k < 0) continue;
            double tau = grid.t[0];
            double g_tau = grid.upper[0];
            if (k > 0) {
                const auto i = static_cast<std::size_t>(k);
                tau = 0.5 * (grid.t[i - 1] + grid.t[i]);
                g_tau = 0.5 * (grid.upper[i - 1] + grid.upper[i]);
            }
            const double rem = std::sqrt(horizon - tau);
            const double y = norm_pdf((g_tau - v) / rem) / rem;
            s.sum.add(y);
            s.sq.add(y * y);
        }
        return s;
    });
    Neumaier sum;
    Neumaier sq;
    for (const auto& b : blocks) {
        sum.add(b.sum.value());
        sq.add(b.sq.value());
    }
    const double n = static_cast<double>(cfg.paths);
    McEstimate& e = out.rhs;
    e.config = cfg;
    e.paths_used = cfg.paths;
    e.estimate = sum.value() / n;
    const double var = cfg.paths > 1 ? std::max(0.0, (sq.value() - n * e.estimate * e.estimate) / (n - 1.0)) : 0.0;
    e.std_error = std::sqrt(var / n);
    e.ci_low = e.estimate - 1.96 * e.std_error;
    e.ci_high = e.estimate + 1.96 * e.std_error;
    return out;
}

}  // namespace bcross
