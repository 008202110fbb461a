#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "bcross/image_measure.hpp"

namespace bcross {

enum class Family {
    Linear,            ///< g(t) = a + b t
    SqrtRemaining,     ///< g(t) = a + b sqrt(T - t)
    LogRemaining,      ///< g(t) = a - sqrt((T - t) ln(b / (T - t))), b >= T
    HermiteFamily,     ///< g(t) = a - sqrt(T - t) x(t), x from H_(n-1)
    TimeInverted,      ///< t/T g(T^2 / t) on [T, inf)
    TwoSidedConstant,  ///< g0 = a, g1 = b, b < a
    TwoSidedCurved,    ///< g0 from the two-atom equation, g1 = a + b - g0
    ImagesLambert,     ///< f(t) = a + t y(t) / a, y from the lower Lambert branch
};

/// Canonical lower-case name ("linear", "sqrt-remaining", ...).
std::string_view family_name(Family f);
/// Inverse of family_name; throws DomainError for unknown names.
Family family_from_name(std::string_view name);

class BarrierSpec;

namespace params {
struct Linear {
    double a, b;
};
struct SqrtRemaining {
    double a, b;
};
struct LogRemaining {
    double a, b;
};
struct Hermite {
    double a, b;
    unsigned n;
    double largest_zero;  ///< z_n, cached at construction
};
struct TimeInverted {
    std::shared_ptr<const BarrierSpec> base;
};
struct TwoSidedConstant {
    double a, b;
};
struct TwoSidedCurved {
    double a, b, c;
};
struct ImagesLambert {
    double a, b;
};
}  // namespace params

/// Immutable description of one barrier family member. Factories validate
/// the family constraints and throw DomainError when they fail.
class BarrierSpec {
public:
    using Params = std::variant<params::Linear, params::SqrtRemaining, params::LogRemaining, params::Hermite,
                                params::TimeInverted, params::TwoSidedConstant, params::TwoSidedCurved,
                                params::ImagesLambert>;

    static BarrierSpec linear(double a, double b, double horizon);
    static BarrierSpec sqrt_remaining(double a, double b, double horizon);
    static BarrierSpec log_remaining(double a, double b, double horizon);
    static BarrierSpec hermite(unsigned n, double a, double b, double horizon);
    static BarrierSpec time_inverted(const BarrierSpec& base);
    static BarrierSpec two_sided_constant(double a, double b, double horizon);
    static BarrierSpec two_sided_curved(double a, double b, double c, double horizon);
    static BarrierSpec images_lambert(double a, double b, double horizon);

    Family family() const;
    /// T for every family (T' for ImagesLambert; the base T for TimeInverted).
    double horizon() const noexcept { return horizon_; }
    const Params& params() const noexcept { return params_; }

    template <class P>
    const P& as() const {
        return std::get<P>(params_);
    }

    bool one_sided() const;
    bool two_sided() const;

    /// Same family with every level moved down by `shift` (a -> a - shift,
    /// b -> b - shift for the two-sided families). Throws for families where
    /// a translation leaves the family.
    BarrierSpec translated(double shift) const;

    /// The mirror barrier -g (Linear and SqrtRemaining only).
    BarrierSpec negated() const;

private:
    BarrierSpec(Params p, double horizon) : params_(std::move(p)), horizon_(horizon) {}

    Params params_;
    double horizon_;
};

struct Band {
    double upper;  ///< g0
    double lower;  ///< g1
};

/// One-sided barrier value at t. Domain is [0, T] ([T, inf) for TimeInverted).
double barrier_eval(const BarrierSpec& spec, double t);

/// Two-sided band at t in [0, T].
Band band_eval(const BarrierSpec& spec, double t);

/// Largest root of H_(n-1)(x) exp(-x^2/2) = (T - t)^(n/2) / b, t in [0, T).
double hermite_barrier_x(const BarrierSpec& spec, double t);

/// Band for TwoSidedCurved: g0 the largest root, g1 = a + b - g0.
Band curved_two_sided_solve(const BarrierSpec& spec, double t);

/// Lower-branch root of y e^y = -a exp(-a^2 / (2t)) / b, 0 < t <= T'.
double images_lambert_y(const BarrierSpec& spec, double t);

/// Time inversion t/T g(T^2 / t). Inverting a TimeInverted spec returns its base.
BarrierSpec time_invert(const BarrierSpec& spec);

/// Residual of the scalar equation that defines a root-solved barrier at t,
/// scaled to be dimensionless. Zero for closed-form families.
double barrier_residual(const BarrierSpec& spec, double t);

/// Image measure paired with a one-sided family (the Linear entry is the
/// closed-form limit of the approximating sequence). ImagesLambert returns
/// b delta'_a with horizon T'. TimeInverted returns the base measure.
ImageMeasure image_measure(const BarrierSpec& spec);

struct BandMeasures {
    ImageMeasure upper;  ///< mu_0, supported on [g0(T), inf)
    ImageMeasure lower;  ///< mu_1, supported on (-inf, g1(T)]
    int truncation = 0;  ///< last series index kept (TwoSidedConstant), 0 otherwise
};

/// Image measures for the two-sided families. For TwoSidedConstant the
/// alternating series is cut at the first even index whose terms fall below
/// 1e-15, judged from the start point `start`.
BandMeasures band_measures(const BarrierSpec& spec, double start = 0.0);

/// The log-remaining barrier reflected about a: a + sqrt((T - t) ln(b / (T - t))).
/// It solves U = 1 against the same measure, but U is unbounded below it, so
/// the measure is not a valid image for it.
std::function<double(double)> log_remaining_mirrored(double a, double b, double horizon);

/// Callable wrapping barrier_eval.
std::function<double(double)> barrier_function(const BarrierSpec& spec);

}  // namespace bcross
