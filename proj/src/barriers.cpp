#include "bcross/barriers.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "bcross/errors.hpp"
#include "bcross/special_fns.hpp"
#include "roots.hpp"

namespace bcross {

namespace {

constexpr double kSqrt2Pi = 2.50662827463100050242;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative slack on boundary parameter constraints so that exact boundary
// values computed in floating point are accepted.
constexpr double kBoundarySlack = 1e-12;

constexpr std::array<std::pair<Family, std::string_view>, 8> kNames = {{
    {Family::Linear, "linear"},
    {Family::SqrtRemaining, "sqrt-remaining"},
    {Family::LogRemaining, "log-remaining"},
    {Family::HermiteFamily, "hermite"},
    {Family::TimeInverted, "time-inverted"},
    {Family::TwoSidedConstant, "two-sided-constant"},
    {Family::TwoSidedCurved, "two-sided-curved"},
    {Family::ImagesLambert, "images-lambert"},
}};

void require_finite(std::initializer_list<double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("barrier parameters must be finite");
    }
}

void require_horizon(double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon T must be positive and finite");
}

void require_time(double t, double horizon) {
    if (!(t >= 0.0 && t <= horizon)) throw DomainError("time outside [0, T]");
}

// H_(n-1)(z_n) exp(-z_n^2/2): the largest value of H_(n-1)(x) exp(-x^2/2)
// beyond z_n.
double hermite_peak(unsigned n, double z) { return hermite_eval(n - 1, z) * std::exp(-0.5 * z * z); }

double log_remaining_eval(double a, double b, double horizon, double t) {
    const double rem = horizon - t;
    if (rem <= 0.0) return a;
    return a - std::sqrt(rem * std::log(b / rem));
}

}  // namespace

std::string_view family_name(Family f) {
    for (const auto& [fam, name] : kNames) {
        if (fam == f) return name;
    }
    return "unknown";
}

Family family_from_name(std::string_view name) {
    for (const auto& [fam, n] : kNames) {
        if (n == name) return fam;
    }
    throw DomainError("unknown barrier family '" + std::string(name) + "'");
}

BarrierSpec BarrierSpec::linear(double a, double b, double horizon) {
    require_horizon(horizon);
    require_finite({a, b});
    return BarrierSpec(params::Linear{a, b}, horizon);
}

BarrierSpec BarrierSpec::sqrt_remaining(double a, double b, double horizon) {
    require_horizon(horizon);
    require_finite({a, b});
    return BarrierSpec(params::SqrtRemaining{a, b}, horizon);
}

BarrierSpec BarrierSpec::log_remaining(double a, double b, double horizon) {
    require_horizon(horizon);
    require_finite({a, b});
    if (!(b >= horizon)) throw DomainError("log-remaining barrier needs b >= T");
    return BarrierSpec(params::LogRemaining{a, b}, horizon);
}

BarrierSpec BarrierSpec::hermite(unsigned n, double a, double b, double horizon) {
    require_horizon(horizon);
    require_finite({a, b});
    if (n == 0) throw DomainError("hermite barrier needs n >= 1");
    const double z = hermite_largest_zero(n);
    const double bound = std::pow(horizon, 0.5 * n) / hermite_peak(n, z);
    if (!(b >= bound * (1.0 - kBoundarySlack))) {
        throw DomainError("hermite barrier needs b >= exp(z_n^2/2) T^(n/2) / H_(n-1)(z_n)");
    }
    return BarrierSpec(params::Hermite{a, b, n, z}, horizon);
}

BarrierSpec BarrierSpec::time_inverted(const BarrierSpec& base) {
    switch (base.family()) {
        case Family::Linear:
        case Family::SqrtRemaining:
        case Family::LogRemaining:
        case Family::HermiteFamily:
            return BarrierSpec(params::TimeInverted{std::make_shared<const BarrierSpec>(base)}, base.horizon());
        default:
            throw DomainError("time inversion supports the linear, sqrt-remaining, log-remaining and hermite families");
    }
}

BarrierSpec BarrierSpec::two_sided_constant(double a, double b, double horizon) {
    require_horizon(horizon);
    require_finite({a, b});
    if (!(b < a)) throw DomainError("two-sided barrier needs b < a");
    return BarrierSpec(params::TwoSidedConstant{a, b}, horizon);
}

BarrierSpec BarrierSpec::two_sided_curved(double a, double b, double c, double horizon) {
    require_horizon(horizon);
    require_finite({a, b, c});
    if (!(b < a)) throw DomainError("two-sided barrier needs b < a");
    const double floor = 2.0 * norm_cdf((b - a) / (2.0 * std::sqrt(horizon)));
    if (!(c > floor && c < 1.0)) throw DomainError("two-sided curved barrier needs 2N((b-a)/(2 sqrt T)) < c < 1");
    return BarrierSpec(params::TwoSidedCurved{a, b, c}, horizon);
}

BarrierSpec BarrierSpec::images_lambert(double a, double b, double horizon) {
    require_horizon(horizon);
    require_finite({a, b});
    if (!(a > 0.0)) throw DomainError("images-lambert barrier needs a > 0");
    const double bound = a * std::exp(1.0 - a * a / (2.0 * horizon));
    if (!(b >= bound * (1.0 - kBoundarySlack))) {
        throw DomainError("images-lambert barrier needs b >= a exp(1 - a^2 / (2T'))");
    }
    return BarrierSpec(params::ImagesLambert{a, b}, horizon);
}

Family BarrierSpec::family() const { return static_cast<Family>(params_.index()); }

bool BarrierSpec::two_sided() const {
    const Family f = family();
    return f == Family::TwoSidedConstant || f == Family::TwoSidedCurved;
}

bool BarrierSpec::one_sided() const { return !two_sided(); }

BarrierSpec BarrierSpec::translated(double shift) const {
    switch (family()) {
        case Family::Linear: {
            const auto& p = as<params::Linear>();
            return linear(p.a - shift, p.b, horizon_);
        }
        case Family::SqrtRemaining: {
            const auto& p = as<params::SqrtRemaining>();
            return sqrt_remaining(p.a - shift, p.b, horizon_);
        }
        case Family::LogRemaining: {
            const auto& p = as<params::LogRemaining>();
            return log_remaining(p.a - shift, p.b, horizon_);
        }
        case Family::HermiteFamily: {
            const auto& p = as<params::Hermite>();
            return BarrierSpec(params::Hermite{p.a - shift, p.b, p.n, p.largest_zero}, horizon_);
        }
        case Family::TwoSidedConstant: {
            const auto& p = as<params::TwoSidedConstant>();
            return two_sided_constant(p.a - shift, p.b - shift, horizon_);
        }
        case Family::TwoSidedCurved: {
            const auto& p = as<params::TwoSidedCurved>();
            return two_sided_curved(p.a - shift, p.b - shift, p.c, horizon_);
        }
        default:
            throw DomainError(std::string(family_name(family())) + " barrier is not closed under translation");
    }
}

BarrierSpec BarrierSpec::negated() const {
    switch (family()) {
        case Family::Linear: {
            const auto& p = as<params::Linear>();
            return linear(-p.a, -p.b, horizon_);
        }
        case Family::SqrtRemaining: {
            const auto& p = as<params::SqrtRemaining>();
            return sqrt_remaining(-p.a, -p.b, horizon_);
        }
        default:
            throw DomainError("only linear and sqrt-remaining barriers have a mirrored family member");
    }
}

double hermite_barrier_x(const BarrierSpec& spec, double t) {
    const auto& p = spec.as<params::Hermite>();
    const double horizon = spec.horizon();
    if (!(t >= 0.0 && t < horizon)) throw DomainError("hermite x(t) needs 0 <= t < T");
    const unsigned n = p.n;
    const double log_rhs = 0.5 * n * std::log(horizon - t) - std::log(p.b);

    // q(x) = log(H_(n-1)(x) e^(-x^2/2)) - log rhs is strictly decreasing past z_n.
    auto q = [&](double x) {
        const double h = hermite_eval(n - 1, x);
        const double hn = hermite_eval(n, x);
        return std::pair{std::log(h) - 0.5 * x * x - log_rhs, -hn / h};
    };
    const double z = p.largest_zero;
    const double q_at_zero = q(z).first;
    if (q_at_zero <= 0.0) {
        if (q_at_zero > -kBoundarySlack) return z;
        throw DomainError("hermite barrier equation has no solution (b below its lower bound)");
    }
    double hi = std::max(z + 1.0, std::sqrt(std::max(0.0, -2.0 * log_rhs)) + 1.0);
    while (q(hi).first > 0.0) hi *= 2.0;
    return detail::bracketed_newton(q, z, hi);
}

Band curved_two_sided_solve(const BarrierSpec& spec, double t) {
    const auto& p = spec.as<params::TwoSidedCurved>();
    const double horizon = spec.horizon();
    require_time(t, horizon);
    const double rem = horizon - t;
    if (rem <= 0.0) return {p.a, p.b};
    const double s = std::sqrt(rem);
    auto f = [&](double w) {
        const double za = (w - p.a) / s;
        const double zb = (p.b - w) / s;
        return std::pair{norm_cdf(za) + norm_cdf(zb) - p.c, (norm_pdf(za) - norm_pdf(zb)) / s};
    };
    const double mid = 0.5 * (p.a + p.b);
    double width = 8.0 * s;
    double hi = p.a + width;
    while (f(hi).first < 0.0) {
        width *= 2.0;
        hi = p.a + width;
    }
    const double g0 = detail::bracketed_newton(f, mid, hi);
    return {g0, (p.a + p.b) - g0};
}

double images_lambert_y(const BarrierSpec& spec, double t) {
    const auto& p = spec.as<params::ImagesLambert>();
    if (!(t > 0.0 && t <= spec.horizon())) throw DomainError("images-lambert y(t) needs 0 < t <= T'");
    double log_arg = std::log(p.a / p.b) - p.a * p.a / (2.0 * t);
    if (log_arg > -1.0) {
        if (log_arg > -1.0 + kBoundarySlack) throw DomainError("Lambert argument below -1/e (b too small)");
        log_arg = -1.0;
    }
    return lambert_w_lower_from_log(log_arg);
}

double barrier_eval(const BarrierSpec& spec, double t) {
    const double horizon = spec.horizon();
    switch (spec.family()) {
        case Family::Linear: {
            require_time(t, horizon);
            const auto& p = spec.as<params::Linear>();
            return p.a + p.b * t;
        }
        case Family::SqrtRemaining: {
            require_time(t, horizon);
            const auto& p = spec.as<params::SqrtRemaining>();
            return p.a + p.b * std::sqrt(horizon - t);
        }
        case Family::LogRemaining: {
            require_time(t, horizon);
            const auto& p = spec.as<params::LogRemaining>();
            return log_remaining_eval(p.a, p.b, horizon, t);
        }
        case Family::HermiteFamily: {
            require_time(t, horizon);
            const auto& p = spec.as<params::Hermite>();
            if (t == horizon) return p.a;
            return p.a - std::sqrt(horizon - t) * hermite_barrier_x(spec, t);
        }
        case Family::TimeInverted: {
            if (!(t >= horizon) || std::isinf(t)) throw DomainError("time-inverted barrier lives on [T, inf)");
            const BarrierSpec& base = *spec.as<params::TimeInverted>().base;
            if (base.family() == Family::SqrtRemaining) {
                const auto& p = base.as<params::SqrtRemaining>();
                return p.a * t / horizon + p.b * std::sqrt(std::max(0.0, t * t / horizon - t));
            }
            return t / horizon * barrier_eval(base, horizon * horizon / t);
        }
        case Family::ImagesLambert: {
            require_time(t, horizon);
            const auto& p = spec.as<params::ImagesLambert>();
            if (t < 1e-12) return 0.5 * p.a;
            return p.a + t * images_lambert_y(spec, t) / p.a;
        }
        default:
            throw DomainError("barrier_eval needs a one-sided family; use band_eval");
    }
}

Band band_eval(const BarrierSpec& spec, double t) {
    switch (spec.family()) {
        case Family::TwoSidedConstant: {
            require_time(t, spec.horizon());
            const auto& p = spec.as<params::TwoSidedConstant>();
            return {p.a, p.b};
        }
        case Family::TwoSidedCurved:
            return curved_two_sided_solve(spec, t);
        default:
            throw DomainError("band_eval needs a two-sided family");
    }
}

BarrierSpec time_invert(const BarrierSpec& spec) {
    if (spec.family() == Family::TimeInverted) return *spec.as<params::TimeInverted>().base;
    return BarrierSpec::time_inverted(spec);
}

double barrier_residual(const BarrierSpec& spec, double t) {
    switch (spec.family()) {
        case Family::HermiteFamily: {
            if (t >= spec.horizon()) return 0.0;
            const auto& p = spec.as<params::Hermite>();
            const double x = hermite_barrier_x(spec, t);
            const double lhs = p.b * hermite_eval(p.n - 1, x) * std::exp(-0.5 * x * x);
            return std::abs(lhs / std::pow(spec.horizon() - t, 0.5 * p.n) - 1.0);
        }
        case Family::TwoSidedCurved: {
            const auto& p = spec.as<params::TwoSidedCurved>();
            const double rem = spec.horizon() - t;
            if (rem <= 0.0) return 0.0;
            const double s = std::sqrt(rem);
            const double g0 = curved_two_sided_solve(spec, t).upper;
            return std::abs(norm_cdf((g0 - p.a) / s) + norm_cdf((p.b - g0) / s) - p.c);
        }
        case Family::ImagesLambert: {
            if (t < 1e-12) return 0.0;
            const auto& p = spec.as<params::ImagesLambert>();
            const double y = images_lambert_y(spec, t);
            const double log_arg = std::max(-1.0, std::log(p.a / p.b) - p.a * p.a / (2.0 * t));
            // log form of y e^y = x, relative to |x|
            return std::abs(std::expm1(y + std::log(-y) - log_arg));
        }
        default:
            return 0.0;
    }
}

ImageMeasure image_measure(const BarrierSpec& spec) {
    const double horizon = spec.horizon();
    switch (spec.family()) {
        case Family::Linear: {
            const auto& p = spec.as<params::Linear>();
            const double end = p.a + p.b * horizon;
            std::vector<ExpComponent> comps;
            if (p.b != 0.0) comps.push_back({2.0 * p.b, end, kInf, 1.0});
            return ImageMeasure({{end, 0, 2.0}}, std::move(comps), horizon);
        }
        case Family::SqrtRemaining: {
            const auto& p = spec.as<params::SqrtRemaining>();
            return ImageMeasure({{p.a, 0, 1.0 / norm_cdf(p.b)}}, {}, horizon);
        }
        case Family::LogRemaining: {
            const auto& p = spec.as<params::LogRemaining>();
            return ImageMeasure({{p.a, 1, std::sqrt(2.0 * std::numbers::pi * p.b)}}, {}, horizon);
        }
        case Family::HermiteFamily: {
            const auto& p = spec.as<params::Hermite>();
            return ImageMeasure({{p.a, p.n, kSqrt2Pi * p.b}}, {}, horizon);
        }
        case Family::TimeInverted:
            return image_measure(*spec.as<params::TimeInverted>().base);
        case Family::ImagesLambert: {
            const auto& p = spec.as<params::ImagesLambert>();
            return ImageMeasure({{p.a, 1, p.b}}, {}, horizon);
        }
        default:
            throw DomainError("image_measure needs a one-sided family; use band_measures");
    }
}

BandMeasures band_measures(const BarrierSpec& spec, double start) {
    const double horizon = spec.horizon();
    switch (spec.family()) {
        case Family::TwoSidedConstant: {
            const auto& p = spec.as<params::TwoSidedConstant>();
            const double width = p.a - p.b;
            const double root_t = std::sqrt(horizon);
            int last = 0;
            for (int j = 0; j <= 100000; j += 2) {
                const double up = 2.0 * norm_cdf((start - p.a - j * width) / root_t);
                const double down = 2.0 * norm_cdf((p.b - start - j * width) / root_t);
                last = j;
                if (up < 1e-15 && down < 1e-15) break;
            }
            std::vector<DiracAtom> upper;
            std::vector<DiracAtom> lower;
            for (int j = 0; j <= last; ++j) {
                const double w = j % 2 == 0 ? 2.0 : -2.0;
                upper.push_back({p.a + j * width, 0, w});
                lower.push_back({p.b - j * width, 0, w});
            }
            return {ImageMeasure(std::move(upper), {}, horizon), ImageMeasure(std::move(lower), {}, horizon), last};
        }
        case Family::TwoSidedCurved: {
            const auto& p = spec.as<params::TwoSidedCurved>();
            return {ImageMeasure({{p.a, 0, 1.0 / p.c}}, {}, horizon), ImageMeasure({{p.b, 0, 1.0 / p.c}}, {}, horizon),
                    0};
        }
        default:
            throw DomainError("band_measures needs a two-sided family");
    }
}

std::function<double(double)> log_remaining_mirrored(double a, double b, double horizon) {
    require_horizon(horizon);
    if (!(b >= horizon)) throw DomainError("mirrored log-remaining barrier needs b >= T");
    return [a, b, horizon](double t) {
        require_time(t, horizon);
        return 2.0 * a - log_remaining_eval(a, b, horizon, t);
    };
}

std::function<double(double)> barrier_function(const BarrierSpec& spec) {
    return [spec](double t) { return barrier_eval(spec, t); };
}

}  // namespace bcross
