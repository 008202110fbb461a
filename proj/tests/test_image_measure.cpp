#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "bcross/errors.hpp"
#include "bcross/image_measure.hpp"
#include "bcross/special_fns.hpp"
#include "support.hpp"

using namespace bcross;
using bcross::testing::for_all;
using bcross::testing::Gen;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ImageMeasure mixed() {
    return ImageMeasure({{1.3, 1, 0.7}, {2.0, 0, 0.4}}, std::vector<ExpComponent>{{0.5, 1.5, kInf, 0.3}}, 1.0);
}

}  // namespace

TEST_CASE("construction rejects malformed measures") {
    CHECK_THROWS_AS(ImageMeasure({}, {}, 1.0), DomainError);
    CHECK_THROWS_AS(ImageMeasure({{0.0, 0, 1.0}}, {}, 0.0), DomainError);
    CHECK_THROWS_AS(ImageMeasure({}, std::vector<ExpComponent>{{1.0, 2.0, 1.0, 1.0}}, 1.0), DomainError);
}

TEST_CASE("single atom pairs with the shifted normal CDF") {
    const ImageMeasure m({{1.5, 0, 2.0}}, {}, 1.0);
    CHECK(u_functional(m, 0.2, 0.7) == doctest::Approx(2.0 * norm_cdf((0.2 - 1.5) / std::sqrt(0.7))).epsilon(1e-15));
    CHECK(u_eval(m, 0.2, 0.3) == u_functional(m, 0.2, 0.7));
    CHECK(u_eval(m, 0.2, 1.0) == 0.0);
}

TEST_CASE("Dirac derivative atoms follow the sign convention") {
    // <delta_a', phi> = -phi'(a) with phi(v) = N((u - v)/s) gives N'((u - a)/s) / s
    const double s = std::sqrt(0.6);
    const ImageMeasure m({{0.9, 1, 1.0}}, {}, 1.0);
    CHECK(u_eval(m, 0.1, 0.4) == doctest::Approx(norm_pdf((0.1 - 0.9) / s) / s).epsilon(1e-14));
}

TEST_CASE("exponential components agree with direct quadrature") {
    const double rate = 0.5, lower = 1.5, w = 0.3, u = 0.4, rem = 0.7;
    const ImageMeasure m({}, std::vector<ExpComponent>{{rate, lower, kInf, w}}, 1.0);
    auto integrand = [&](double v) {
        return w * rate * std::exp(rate * (v - lower) + log_norm_cdf((u - v) / std::sqrt(rem)));
    };
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lower, kInf, 15, 1e-14);
    CHECK(u_functional(m, u, rem) == doctest::Approx(q).epsilon(1e-11));

    const ImageMeasure finite({}, std::vector<ExpComponent>{{-1.2, -0.5, 2.0, 1.1}}, 1.0);
    auto f2 = [&](double v) { return 1.1 * -1.2 * std::exp(-1.2 * (v + 0.5)) * norm_cdf((u - v) / std::sqrt(rem)); };
    const double q2 = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f2, -0.5, 2.0, 15, 1e-14);
    CHECK(u_functional(finite, u, rem) == doctest::Approx(q2).epsilon(1e-11));
}

TEST_CASE("derivative measure differentiates U in the state variable") {
    for_all(100, 21, [](Gen& g) {
        const ImageMeasure m = mixed();
        const double u = g.uniform(-2.0, 1.0);
        const double t = g.uniform(0.0, 0.9);
        const double h = 1e-5;
        const double fd = (u_eval(m, u + h, t) - u_eval(m, u - h, t)) / (2 * h);
        CHECK(std::abs(fd - u_eval_derivative(m, u, t)) < 1e-8);
        CHECK(u_eval(m.derivative(), u, t) == doctest::Approx(u_eval_derivative(m, u, t)).epsilon(1e-12));
    });
}

TEST_CASE("shift, horizon change and sums act on U as expected") {
    const ImageMeasure m = mixed();
    for_all(50, 22, [&](Gen& g) {
        const double u = g.uniform(-2.0, 2.0);
        const double rem = g.uniform(0.05, 2.0);
        const double h = g.uniform(-1.0, 1.0);
        CHECK(u_functional(m.shifted(h), u + h, rem) == doctest::Approx(u_functional(m, u, rem)).epsilon(1e-13));
        CHECK(u_functional(m + m, u, rem) == doctest::Approx(2.0 * u_functional(m, u, rem)).epsilon(1e-14));
    });
    CHECK(m.with_horizon(3.0).horizon() == 3.0);
    CHECK(m.support_min() == 1.3);
    CHECK_THROWS_AS(m + m.with_horizon(2.0), DomainError);
}

TEST_CASE("n2 pairing of an ordinary atom") {
    const ImageMeasure m({{1.2, 0, 0.8}}, {}, 2.0);
    const double x = 0.3, rho = -0.4;
    CHECK(n2_pairing(m, x, rho) ==
          doctest::Approx(0.8 * bivariate_norm_cdf(x, -1.2 / std::sqrt(2.0), Correlation(rho))).epsilon(1e-14));
    CHECK(n2_pairing_mirror(m, x, rho) ==
          doctest::Approx(0.8 * bivariate_norm_cdf(x, 1.2 / std::sqrt(2.0), Correlation(rho))).epsilon(1e-14));
}

TEST_CASE("remaining_time_grid layout") {
    const auto grid = remaining_time_grid(2.0, 1000);
    REQUIRE(grid.size() == 1000);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == doctest::Approx(2.0 * (1 - 1e-6)).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("identity check on a constant barrier") {
    // 2 delta_a reproduces U = 1 along g = a
    const ImageMeasure m({{1.0, 0, 2.0}}, {}, 1.0);
    const auto grid = remaining_time_grid(1.0, 200);
    const IdentityReport rep = verify_barrier_identity(m, [](double) { return 1.0; }, grid);
    CHECK(rep.max_abs_deviation < 1e-15);
    CHECK(rep.bounded);
    const IdentityReport off = verify_barrier_identity(m, [](double) { return 0.9; }, grid);
    CHECK(off.max_abs_deviation > 0.5);
}

TEST_CASE("behaviour as t approaches the horizon") {
    const ImageMeasure plain({{1.0, 0, 0.6}, {2.0, 0, 0.3}}, {}, 1.0);
    const double t = 1.0 - 1e-8;
    CHECK(u_eval(plain, 1.5, t) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(u_eval(plain, 2.5, t) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(u_eval(plain, 0.5, t) < 1e-12);

    const ImageMeasure derivs({{1.0, 1, 0.6}, {2.0, 2, 0.3}}, {}, 1.0);
    for (double u : {0.5, 1.5, 2.5}) CHECK(std::abs(u_eval(derivs, u, t)) < 1e-12);
}

TEST_CASE("U has bounded second differences away from atoms") {
    const ImageMeasure m = mixed();
    for (double t : {0.9, 0.99, 0.999}) {
        double worst = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double u = -2.0 + 2.5 * i / 100.0;  // stays below the support
            const double h = 1e-4;
            const double d2 = (u_eval(m, u + h, t) - 2.0 * u_eval(m, u, t) + u_eval(m, u - h, t)) / (h * h);
            worst = std::max(worst, std::abs(d2));
        }
        CAPTURE(t);
        CHECK(std::isfinite(worst));
        CHECK(worst < 10.0);
    }
}

TEST_CASE("U is linear in the measure") {
    const ImageMeasure atoms({{1.3, 1, 0.7}, {2.0, 0, 0.4}}, {}, 1.0);
    const ImageMeasure exps({}, std::vector<ExpComponent>{{0.5, 1.5, kInf, 0.3}}, 1.0);
    const ImageMeasure mixed2({{1.1, 2, -0.2}}, std::vector<ExpComponent>{{0.5, 1.5, kInf, 0.3}}, 1.0);
    for_all(200, 23, [&](Gen& g) {
        const double u = g.uniform(-2.0, 1.0);
        const double t = g.uniform(0.0, 0.99);
        // atoms are summed before exponential components, so this split is exact
        CHECK(u_eval(atoms + exps, u, t) == u_eval(atoms, u, t) + u_eval(exps, u, t));
        // otherwise the two sides differ only by the order of the additions
        const double scale = u_eval(atoms, u, t) + std::abs(u_eval(mixed2, u, t)) + 1.0;
        CHECK(std::abs(u_eval(atoms + mixed2, u, t) - (u_eval(atoms, u, t) + u_eval(mixed2, u, t))) <= 4e-16 * scale);
    });
}
