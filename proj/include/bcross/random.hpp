#pragma once

#include <array>
#include <cstdint>

namespace bcross {

namespace detail {
struct ZigguratTables {
    static constexpr int kLayers = 128;
    static constexpr double kR = 3.442619855899;
    static constexpr double kArea = 9.91256303526217e-3;

    std::uint32_t k[kLayers];
    double w[kLayers];
    double f[kLayers];

    ZigguratTables();
};
extern const ZigguratTables kZiggurat;

inline std::uint32_t magnitude(std::int32_t v) noexcept {
    return v < 0 ? 0u - static_cast<std::uint32_t>(v) : static_cast<std::uint32_t>(v);
}
}  // namespace detail

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }
};

/// Sequential draws from the Philox stream addressed by (seed, stream, path).
/// Two streams with different (stream, path) never share a counter.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t path) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0u, stream, static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)} {}

    std::uint32_t next_u32() noexcept {
        if (used_ == 4) refill();
        return buffer_[used_++];
    }

    /// Uniform on (0, 1) with 32 bits of resolution.
    double uniform32() noexcept { return (static_cast<double>(next_u32()) + 0.5) * 0x1p-32; }

    /// Uniform on (0, 1) with 53 bits of resolution.
    double uniform53() noexcept {
        const std::uint64_t hi = next_u32() >> 6;
        const std::uint64_t lo = next_u32() >> 5;
        return (static_cast<double>((hi << 27) | lo) + 0.5) * 0x1p-53;
    }

    /// Standard normal variate (128-layer Marsaglia-Tsang ziggurat). The
    /// layer index comes from the low 7 bits and the signed magnitude from the
    /// other 25, so the two are independent.
    double normal() noexcept {
        const std::uint32_t u = next_u32();
        const unsigned layer = u & 127u;
        const auto hz = static_cast<std::int32_t>(u & ~127u);
        if (detail::magnitude(hz) < detail::kZiggurat.k[layer]) return hz * detail::kZiggurat.w[layer];
        return normal_slow(hz, layer);
    }

private:
    double normal_slow(std::int32_t hz, unsigned layer) noexcept;
    void refill() noexcept {
        buffer_ = Philox4x32::block(ctr_, key_);
        ++ctr_[0];
        used_ = 0;
    }

    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter buffer_{};
    unsigned used_ = 4;
};

}  // namespace bcross
