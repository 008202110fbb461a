#include <array>
#include <cmath>
#include <exception>
#include <optional>

#include "analytics_internal.hpp"
#include "bcross/analytics.hpp"
#include "bcross/errors.hpp"

namespace bcross {

namespace {

constexpr std::array<std::pair<DensityKind, std::string_view>, 4> kKindNames = {{
    {DensityKind::sigma, "sigma"},
    {DensityKind::lambda, "lambda"},
    {DensityKind::hitting_inverted, "hitting-inverted"},
    {DensityKind::hitting_images, "hitting-images"},
}};

void require_kind(const BarrierSpec& spec, DensityKind kind) {
    const Family f = spec.family();
    bool ok = false;
    switch (kind) {
        case DensityKind::sigma:
            ok = f != Family::TimeInverted && f != Family::ImagesLambert;
            break;
        case DensityKind::lambda:
            ok = f == Family::Linear || f == Family::SqrtRemaining;
            break;
        case DensityKind::hitting_inverted:
            ok = f == Family::TimeInverted;
            break;
        case DensityKind::hitting_images:
            ok = f == Family::ImagesLambert;
            break;
    }
    if (!ok) {
        throw DomainError(std::string(density_kind_name(kind)) + " curves are not available for the " +
                          std::string(family_name(f)) + " family");
    }
}

struct Evaluator {
    const BarrierSpec& spec;
    DensityKind kind;
    std::optional<ImageMeasure> measure;

    Evaluator(const BarrierSpec& s, DensityKind k) : spec(s), kind(k) {
        require_kind(spec, kind);
        if (kind == DensityKind::hitting_images) {
            measure = image_measure(spec);
            // Checked once here rather than at every grid point.
            (void)images_crossing(spec, *measure, spec.horizon());
        }
    }

    std::pair<double, double> operator()(double t) const {
        switch (kind) {
            case DensityKind::sigma:
                return {sigma_cdf(spec, t), sigma_pdf(spec, t)};
            case DensityKind::lambda:
                return {lambda_cdf(spec, t), lambda_pdf(spec, t)};
            case DensityKind::hitting_inverted:
                return {hitting_cdf_inverted(spec, t), hitting_pdf_inverted(spec, t)};
            case DensityKind::hitting_images:
                return {detail::images_crossing_value(spec, *measure, t), images_hitting_pdf(spec, *measure, t)};
        }
        return {0.0, 0.0};
    }
};

DensityCurve prepare(const BarrierSpec& spec, DensityKind kind, const GridOptions& opts) {
    DensityCurve curve{kind, density_grid(spec, kind, opts), {}, {}};
    curve.cdf.resize(curve.grid.size());
    curve.pdf.resize(curve.grid.size());
    return curve;
}

}  // namespace

std::string_view density_kind_name(DensityKind k) {
    for (const auto& [kind, name] : kKindNames) {
        if (kind == k) return name;
    }
    return "unknown";
}

DensityKind density_kind_from_name(std::string_view name) {
    for (const auto& [kind, n] : kKindNames) {
        if (n == name) return kind;
    }
    throw DomainError("unknown density kind '" + std::string(name) + "'");
}

std::vector<double> density_grid(const BarrierSpec& spec, DensityKind kind, const GridOptions& opts) {
    require_kind(spec, kind);
    if (opts.points < 2) throw DomainError("grid needs at least 2 points");
    if (!(opts.clip > 0.0 && opts.clip < 0.5)) throw DomainError("grid clip must lie in (0, 0.5)");
    const double horizon = spec.horizon();
    double lo = opts.clip * horizon;
    double hi = horizon * (1.0 - opts.clip);
    if (kind == DensityKind::hitting_inverted) {
        if (!(opts.inverted_max > 1.0)) throw DomainError("inverted grid end must exceed T");
        lo = horizon * (1.0 + opts.clip);
        hi = opts.inverted_max * horizon;
    }
    // Points cluster at the clipped ends, where sigma, lambda and hitting
    // densities have inverse square-root singularities: the end gap
    // behaves like s^4, plus a linear term of weight clip that keeps the
    // smallest steps well above one ulp.
    std::vector<double> grid(opts.points);
    const std::size_t last = opts.points - 1;
    const double n = static_cast<double>(last);
    const double lin = opts.clip;
    if (kind == DensityKind::hitting_inverted) {
        for (std::size_t i = 0; i <= last; ++i) {
            const double s = static_cast<double>(i) / n;
            grid[i] = lo + (hi - lo) * (lin * s + (1.0 - lin) * std::pow(s, 4));
        }
        grid.back() = hi;
        return grid;
    }
    // Snapped to multiples of ulp(T) so that T - t is exact and the grid is
    // symmetric under t -> T - t.
    const double quantum = std::nextafter(horizon, 2.0 * horizon) - horizon;
    for (std::size_t i = 0; 2 * i < last; ++i) {
        const double s = static_cast<double>(i) / n;
        const double s4 = std::pow(s, 4);
        const double shape = lin * s + (1.0 - lin) * s4 / (s4 + std::pow(1.0 - s, 4));
        grid[i] = std::round((lo + (hi - lo) * shape) / quantum) * quantum;
        if (i > 0 && grid[i] <= grid[i - 1]) grid[i] = grid[i - 1] + quantum;
        grid[last - i] = horizon - grid[i];
    }
    if (last % 2 == 0) grid[last / 2] = 0.5 * horizon;
    return grid;
}

DensityCurve tabulate(const BarrierSpec& spec, DensityKind kind, const GridOptions& opts) {
    const Evaluator eval(spec, kind);
    DensityCurve curve = prepare(spec, kind, opts);
    const auto count = static_cast<std::ptrdiff_t>(curve.grid.size());
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            const auto [c, p] = eval(curve.grid[i]);
            curve.cdf[i] = c;
            curve.pdf[i] = p;
        } catch (...) {
#pragma omp critical(bcross_tabulate_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return curve;
}

DensityCurve tabulate_serial(const BarrierSpec& spec, DensityKind kind, const GridOptions& opts) {
    const Evaluator eval(spec, kind);
    DensityCurve curve = prepare(spec, kind, opts);
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        const auto [c, p] = eval(curve.grid[i]);
        curve.cdf[i] = c;
        curve.pdf[i] = p;
    }
    return curve;
}

}  // namespace bcross
