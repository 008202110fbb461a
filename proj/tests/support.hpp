#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bcross::testing {

// Seeded draws for property tests. Each property runs a fixed number of
// cases so failures reproduce exactly.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    unsigned integer(unsigned lo, unsigned hi) { return std::uniform_int_distribution<unsigned>(lo, hi)(rng_); }
    /// Log-uniform on [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

private:
    std::mt19937_64 rng_;
};

template <class F>
void for_all(int cases, std::uint64_t seed, F&& body) {
    Gen gen(seed);
    for (int i = 0; i < cases; ++i) body(gen);
}

inline double rel_err(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

}  // namespace bcross::testing
