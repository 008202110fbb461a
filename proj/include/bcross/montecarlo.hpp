#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bcross/barriers.hpp"

namespace bcross {

enum class McEngine {
    openmp,  ///< blocks of paths spread over OpenMP threads
    serial,  ///< reference loop over the same blocks
};

struct McConfig {
    std::uint64_t paths = 100000;
    std::uint32_t steps = 4096;
    std::uint64_t seed = 42;
    bool bridge_correction = true;
    double start = 0.0;
    McEngine engine = McEngine::openmp;
    /// OpenMP threads; 0 takes BCROSS_THREADS from the environment, then the
    /// OpenMP default. Results do not depend on it.
    int threads = 0;
    /// Time-inverted barriers are simulated on [T, inverted_max * T].
    double inverted_max = 100.0;

    /// Throws DomainError when paths < 1, steps < 2 or inverted_max <= 1.
    void validate() const;
};

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t paths_used = 0;
    McConfig config;
};

/// Paths per work unit. Work units are combined in index order, so the
/// result is independent of the thread count.
inline constexpr std::uint64_t kMcBlockPaths = 4096;

/// P(tau(start) < T) from discretised paths. Two-sided families stop at either
/// barrier; time-inverted families draw W_T and run on [T, inverted_max T].
McEstimate mc_crossing(const BarrierSpec& spec, const McConfig& cfg);

struct McLastExit {
    std::vector<double> times;  ///< requested times snapped to the simulation grid
    std::vector<double> sigma_cdf;
    std::vector<double> sigma_se;
    std::vector<double> lambda_cdf;
    std::vector<double> lambda_se;
    McConfig config;
};

/// Empirical CDFs of sigma and lambda at the given times in (0, T]. Paths
/// that never touch the barrier count as lambda <= t for every t.
McLastExit mc_last_exit(const BarrierSpec& spec, const McConfig& cfg, std::span<const double> times);

struct FortetCheck {
    double lhs = 0.0;  ///< N'((u - v)/sqrt T) / sqrt T
    McEstimate rhs;    ///< E[N'((g(tau) - v)/sqrt(T - tau)) / sqrt(T - tau); tau < T]
};

/// Fortet's equation for a one-sided family on [0, T], started from u.
/// Throws DomainError unless v > g(T) and u <= g(0).
FortetCheck mc_fortet_check(const BarrierSpec& spec, double v, double u, const McConfig& cfg);

/// Thread count mc_* would use for cfg (after BCROSS_THREADS).
int mc_thread_count(const McConfig& cfg);

}  // namespace bcross
