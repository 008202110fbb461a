#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "bcross/analytics.hpp"
#include "bcross/errors.hpp"
#include "bcross/montecarlo.hpp"
#include "bcross/random.hpp"

using namespace bcross;

namespace {

McConfig small(McEngine engine, int threads = 0) {
    McConfig c;
    c.paths = 2 * kMcBlockPaths + 17;  // a partial last block
    c.steps = 256;
    c.seed = 2024;
    c.engine = engine;
    c.threads = threads;
    return c;
}

void same(const McEstimate& x, const McEstimate& y) {
    CHECK(x.estimate == y.estimate);
    CHECK(x.std_error == y.std_error);
    CHECK(x.paths_used == y.paths_used);
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal and uniform draws") {
    PathRng rng(7, 0, 0);
    const int n = 2000000;
    double sum = 0, sum2 = 0, sum4 = 0;
    int tail = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
        tail += z > 3.0;
    }
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(sum2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(sum4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
    const double p3 = 0.0013498980316301;
    CHECK(std::abs(tail - n * p3) < 5.0 * std::sqrt(n * p3));

    PathRng u(7, 1, 0);
    for (int i = 0; i < 100000; ++i) {
        const double x = u.uniform53();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
    }
    PathRng a(7, 0, 5), b(7, 0, 6), c(7, 1, 5);
    CHECK(a.next_u32() != b.next_u32());
    CHECK(PathRng(7, 0, 5).next_u32() != c.next_u32());
}

TEST_CASE("config validation") {
    McConfig c;
    c.paths = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = {};
    c.steps = 1;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = {};
    c.inverted_max = 1.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("serial and OpenMP engines are bit-identical at any thread count") {
    const BarrierSpec specs[] = {
        BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0),
        BarrierSpec::two_sided_constant(1.0, -1.0, 1.0),
        BarrierSpec::time_inverted(BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0)),
        BarrierSpec::images_lambert(1.0, 2.0, 1.0),
    };
    for (const auto& spec : specs) {
        CAPTURE(family_name(spec.family()));
        const McEstimate ref = mc_crossing(spec, small(McEngine::serial));
        same(mc_crossing(spec, small(McEngine::openmp, 1)), ref);
        same(mc_crossing(spec, small(McEngine::openmp, 3)), ref);
    }

    const auto spec = BarrierSpec::sqrt_remaining(1.0, 0.5, 1.0);
    const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
    const McLastExit ls = mc_last_exit(spec, small(McEngine::serial), times);
    const McLastExit lo = mc_last_exit(spec, small(McEngine::openmp, 3), times);
    CHECK(ls.sigma_cdf == lo.sigma_cdf);
    CHECK(ls.lambda_cdf == lo.lambda_cdf);
    CHECK(ls.times == lo.times);

    const FortetCheck fs = mc_fortet_check(spec, 2.0, 0.0, small(McEngine::serial));
    const FortetCheck fo = mc_fortet_check(spec, 2.0, 0.0, small(McEngine::openmp, 3));
    CHECK(fs.lhs == fo.lhs);
    same(fs.rhs, fo.rhs);
}

TEST_CASE("seeds change the estimate") {
    auto c = small(McEngine::openmp);
    const auto spec = BarrierSpec::linear(1.0, 0.0, 1.0);
    const double e1 = mc_crossing(spec, c).estimate;
    c.seed += 1;
    CHECK(mc_crossing(spec, c).estimate != e1);
}

TEST_CASE("bridge correction only adds crossings") {
    auto c = small(McEngine::openmp);
    const auto spec = BarrierSpec::linear(1.0, 0.0, 1.0);
    const McEstimate with = mc_crossing(spec, c);
    c.bridge_correction = false;
    const McEstimate without = mc_crossing(spec, c);
    CHECK(with.estimate > without.estimate);
}

TEST_CASE("estimates are statistically consistent with closed forms") {
    McConfig c;
    c.paths = 40000;
    c.steps = 1024;
    c.seed = 99;
    const BarrierSpec specs[] = {
        BarrierSpec::linear(1.0, 0.0, 1.0),
        BarrierSpec::log_remaining(1.5, std::numbers::e, 1.0),
        BarrierSpec::two_sided_curved(1.0, -1.0, 0.5, 1.0),
        BarrierSpec::images_lambert(1.0, 2.0, 1.0),
    };
    for (const auto& spec : specs) {
        CAPTURE(family_name(spec.family()));
        const McEstimate e = mc_crossing(spec, c);
        const double exact = *crossing_prob(spec).probability;
        CHECK(std::abs(e.estimate - exact) < 4.0 * e.std_error + 2e-3);
        CHECK(e.ci_low < e.estimate);
        CHECK(e.ci_high > e.estimate);
    }
}

TEST_CASE("Fortet check from the barrier itself is exact") {
    const auto spec = BarrierSpec::sqrt_remaining(1.0, 0.5, 1.0);
    const FortetCheck f = mc_fortet_check(spec, 2.0, barrier_eval(spec, 0.0), small(McEngine::openmp));
    CHECK(f.rhs.estimate == doctest::Approx(f.lhs).epsilon(1e-14));
    CHECK_THROWS_AS(mc_fortet_check(spec, 0.5, 0.0, small(McEngine::openmp)), DomainError);
    CHECK_THROWS_AS(mc_fortet_check(spec, 2.0, 3.0, small(McEngine::openmp)), DomainError);
}

TEST_CASE("last-exit times snap to the simulation grid") {
    const auto spec = BarrierSpec::linear(1.0, 0.0, 1.0);
    const std::vector<double> times{0.3001};
    const McLastExit le = mc_last_exit(spec, small(McEngine::openmp), times);
    CHECK(le.times[0] == doctest::Approx(77.0 / 256.0));
    CHECK_THROWS_AS(mc_last_exit(spec, small(McEngine::openmp), std::vector<double>{1.5}), DomainError);
}

TEST_CASE("standard error halves when paths quadruple") {
    McConfig c;
    c.steps = 256;
    c.seed = 5;
    const auto spec = BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0);
    c.paths = 20000;
    const double se1 = mc_crossing(spec, c).std_error;
    c.paths = 80000;
    const double se4 = mc_crossing(spec, c).std_error;
    CHECK(std::abs(se1 / se4 - 2.0) < 0.4);
}

TEST_CASE("step refinement") {
    const auto lin = BarrierSpec::linear(1.0, 0.0, 1.0);
    McConfig c;
    c.paths = 50000;
    c.seed = 17;
    c.bridge_correction = false;
    double prev = 0.0;
    for (std::uint32_t steps : {16u, 64u, 256u, 1024u}) {
        c.steps = steps;
        const McEstimate e = mc_crossing(lin, c);
        CHECK(e.estimate > prev);
        prev = e.estimate;
    }

    // with the bridge, 2^12 and 2^14 steps agree on every acceptance configuration
    const BarrierSpec specs[] = {
        BarrierSpec::linear(1.0, 0.0, 1.0),
        BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0),
        BarrierSpec::log_remaining(1.5, std::numbers::e, 1.0),
        BarrierSpec::hermite(2, 3.0, 10.0, 1.0),
        BarrierSpec::time_inverted(BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0)),
        BarrierSpec::two_sided_constant(1.0, -1.0, 1.0),
        BarrierSpec::two_sided_curved(1.0, -1.0, 0.5, 1.0),
        BarrierSpec::images_lambert(1.0, 2.0, 1.0),
    };
    McConfig b;
    b.paths = 20000;
    b.seed = 31;
    for (const auto& spec : specs) {
        CAPTURE(family_name(spec.family()));
        b.steps = 1u << 12;
        const McEstimate coarse = mc_crossing(spec, b);
        b.steps = 1u << 14;
        const McEstimate fine = mc_crossing(spec, b);
        CHECK(std::abs(coarse.estimate - fine.estimate) <
              2.0 * std::hypot(coarse.std_error, fine.std_error));
    }
}
