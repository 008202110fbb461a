#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcross/barriers.hpp"
#include "bcross/image_measure.hpp"

namespace bcross {

struct Condition {
    std::string text;
    bool satisfied;
};

/// Outcome of a crossing-probability query. `probability` is empty whenever
/// one of the family conditions fails.
struct CrossingResult {
    std::optional<double> probability;
    bool conditions_met = false;
    std::vector<Condition> condition_report;
    std::string formula;
};

/// P(tau(start) < T) from the family's closed form. Conditions are checked on
/// the translated barrier g - start and reported rather than thrown.
CrossingResult crossing_prob(const BarrierSpec& spec, double start = 0.0);

/// Crossing probability U(start, 0; m) for an arbitrary barrier, accepted only
/// when m is supported on [g(T), inf), U(g(t), t; m) = 1 on the grid and the
/// sampled |U(w, t; m)| stays bounded.
CrossingResult crossing_prob_via_measure(const std::function<double(double)>& g, const ImageMeasure& m,
                                         double start = 0.0, std::size_t grid_points = 1000);

/// P(sigma <= t), 0 < t <= T. Two-sided specs dispatch to two_sided_cdf.
double sigma_cdf(const BarrierSpec& spec, double t);

/// d/dt P(sigma <= t), 0 < t < T, from the family's explicit display
/// (Linear, SqrtRemaining, LogRemaining, Hermite, both two-sided families).
double sigma_pdf(const BarrierSpec& spec, double t);

/// d/dt P(sigma <= t) through U(g(t), t; mu') of the paired measure.
double sigma_pdf_general(const BarrierSpec& spec, double t);

/// P(lambda <= t) and its density for Linear and SqrtRemaining.
double lambda_cdf(const BarrierSpec& spec, double t);
double lambda_pdf(const BarrierSpec& spec, double t);
/// Density of lambda as the sum of the sigma densities of g and -g.
double lambda_pdf_symmetric(const BarrierSpec& spec, double t);

/// P(sigma_hat <= t) for t >= T, where sigma_hat is the first time at or
/// after T that W is above the time-inverted barrier.
double hitting_cdf_inverted(const BarrierSpec& spec, double t);
/// Density of sigma_hat for t > T by the chain rule through the base family.
double hitting_pdf_inverted(const BarrierSpec& spec, double t);
/// Closed-form density for a time-inverted SqrtRemaining barrier.
double hitting_pdf_inverted_explicit(const BarrierSpec& spec, double t);

struct ImagesConditionReport {
    double max_abs_deviation = 0.0;
    double worst_time = 0.0;
    bool holds = false;
};

inline constexpr double kImagesTolerance = 1e-9;

/// max over a grid on (0, T'] of |int exp((2 f(t) v - v^2) / (2t)) dm(v) - 1|.
/// Atom-only measures.
ImagesConditionReport images_condition(const BarrierSpec& spec, const ImageMeasure& m, std::size_t grid_points = 1000);

/// P(tau < T) for the images family, T in (0, T']. Throws PreconditionError
/// when the images condition fails.
CrossingResult images_crossing(const BarrierSpec& spec, const ImageMeasure& m, double horizon);
/// The single-atom closed form N(-f/sqrt T) + sqrt(T) / (a - f) N'(f / sqrt T).
double images_crossing_explicit(const BarrierSpec& spec, double horizon);

/// d/dT P(tau < T) through the measure.
double images_hitting_pdf(const BarrierSpec& spec, const ImageMeasure& m, double horizon);
double images_hitting_pdf_explicit(const BarrierSpec& spec, double horizon);

/// P(sigma <= t) for the two-sided families, 0 < t <= T.
double two_sided_cdf(const BarrierSpec& spec, double t);
/// Explicit two-sided densities.
double two_sided_sigma_pdf(const BarrierSpec& spec, double t);
/// Two-sided density through U(g_i(t), t; mu_0' - mu_1').
double two_sided_sigma_pdf_general(const BarrierSpec& spec, double t);

enum class DensityKind { sigma, lambda, hitting_inverted, hitting_images };

std::string_view density_kind_name(DensityKind k);
DensityKind density_kind_from_name(std::string_view name);

struct DensityCurve {
    DensityKind kind;
    std::vector<double> grid;
    std::vector<double> cdf;
    std::vector<double> pdf;
};

struct GridOptions {
    std::size_t points = 1000;
    double clip = 1e-9;             ///< endpoints pulled in by clip * T
    double inverted_max = 100.0;    ///< hitting_inverted grid ends at inverted_max * T
};

/// Time grid used by tabulate: strictly increasing on [clip T, (1 - clip) T]
/// (or [(1 + clip) T, inverted_max T]), denser towards the ends.
std::vector<double> density_grid(const BarrierSpec& spec, DensityKind kind, const GridOptions& opts = {});

/// Tabulates (t, cdf, pdf) on density_grid. Grid points are evaluated in
/// parallel; results do not depend on the thread count.
DensityCurve tabulate(const BarrierSpec& spec, DensityKind kind, const GridOptions& opts = {});
/// Single-threaded reference for tabulate.
DensityCurve tabulate_serial(const BarrierSpec& spec, DensityKind kind, const GridOptions& opts = {});

}  // namespace bcross
