#include "bcross/random.hpp"

#include <cmath>

namespace bcross {

namespace detail {

ZigguratTables::ZigguratTables() {
    const double m1 = 2147483648.0;
    double dn = kR;
    double tn = dn;
    const double q = kArea / std::exp(-0.5 * dn * dn);
    k[0] = static_cast<std::uint32_t>((dn / q) * m1);
    k[1] = 0;
    w[0] = q / m1;
    w[kLayers - 1] = dn / m1;
    f[0] = 1.0;
    f[kLayers - 1] = std::exp(-0.5 * dn * dn);
    for (int i = kLayers - 2; i >= 1; --i) {
        dn = std::sqrt(-2.0 * std::log(kArea / dn + std::exp(-0.5 * dn * dn)));
        k[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
        tn = dn;
        f[i] = std::exp(-0.5 * dn * dn);
        w[i] = dn / m1;
    }
}

const ZigguratTables kZiggurat;

}  // namespace detail

double PathRng::normal_slow(std::int32_t hz, unsigned layer) noexcept {
    using detail::kZiggurat;
    constexpr double r = detail::ZigguratTables::kR;
    for (;;) {
        const double x = hz * kZiggurat.w[layer];
        if (layer == 0) {
            double tail;
            double y;
            do {
                tail = -std::log(uniform32()) / r;
                y = -std::log(uniform32());
            } while (y + y < tail * tail);
            return hz > 0 ? r + tail : -r - tail;
        }
        if (kZiggurat.f[layer] + uniform32() * (kZiggurat.f[layer - 1] - kZiggurat.f[layer]) < std::exp(-0.5 * x * x)) {
            return x;
        }
        const std::uint32_t u = next_u32();
        layer = u & 127u;
        hz = static_cast<std::int32_t>(u & ~127u);
        if (detail::magnitude(hz) < kZiggurat.k[layer]) return hz * kZiggurat.w[layer];
    }
}

}  // namespace bcross
