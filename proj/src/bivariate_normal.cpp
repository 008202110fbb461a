// Bivariate normal CDF after A. Genz, "Numerical computation of rectangular
// bivariate and trivariate normal and t probabilities", Statistics and
// Computing 14 (2004), which refines Drezner & Wesolowsky (1990).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bcross/special_fns.hpp"

namespace bcross {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

struct GaussLegendre {
    const double* weight;
    const double* node;  // negative half of a symmetric rule
    int count;
};

constexpr std::array<double, 3> kW6 = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr std::array<double, 3> kX6 = {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
constexpr std::array<double, 6> kW12 = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                        0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
constexpr std::array<double, 6> kX12 = {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                                        -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
constexpr std::array<double, 10> kW20 = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                                         0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                                         0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                                         0.1527533871307259};
constexpr std::array<double, 10> kX20 = {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                                         -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                                         -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
                                         -0.07652652113349733};

GaussLegendre rule_for(double abs_rho) {
    if (abs_rho < 0.3) return {kW6.data(), kX6.data(), 3};
    if (abs_rho < 0.75) return {kW12.data(), kX12.data(), 6};
    return {kW20.data(), kX20.data(), 10};
}

// P(X > h, Y > k) for correlation r, |r| < 1.
double upper_orthant(double h, double k, double r) {
    const GaussLegendre gl = rule_for(std::abs(r));
    double hk = h * k;
    double bvn = 0.0;
    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r);
        for (int i = 0; i < gl.count; ++i) {
            double sn = std::sin(asr * (gl.node[i] + 1.0) / 2.0);
            bvn += gl.weight[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            sn = std::sin(asr * (-gl.node[i] + 1.0) / 2.0);
            bvn += gl.weight[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        return bvn * asr / (2.0 * kTwoPi) + norm_cdf(-h) * norm_cdf(-k);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < gl.count; ++i) {
        for (const double sign : {1.0, -1.0}) {
            const double xs = (a * (sign * gl.node[i] + 1.0)) * (a * (sign * gl.node[i] + 1.0));
            const double rs = std::sqrt(1.0 - xs);
            bvn += a * gl.weight[i] *
                   (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                    std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
        }
    }
    bvn = -bvn / kTwoPi;
    if (r > 0.0) return bvn + norm_cdf(-std::max(h, k));
    return -bvn + std::max(0.0, norm_cdf(-h) - norm_cdf(-k));
}

}  // namespace

double bivariate_norm_cdf(double x, double y, Correlation rho) {
    if (std::isnan(x) || std::isnan(y)) return std::numeric_limits<double>::quiet_NaN();
    if (x > y) std::swap(x, y);
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    if (y == std::numeric_limits<double>::infinity()) return norm_cdf(x);

    const double r = rho.value();
    if (r == 1.0) return norm_cdf(x);
    if (r == -1.0) return std::max(0.0, norm_cdf(x) - norm_cdf(-y));
    if (r == 0.0) return norm_cdf(x) * norm_cdf(y);

    const double p = upper_orthant(-x, -y, r);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace bcross
