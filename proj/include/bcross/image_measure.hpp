#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace bcross {

/// weight * delta_location^(order). The pairing with a test function phi is
/// (-1)^order * phi^(order)(location).
struct DiracAtom {
    double location;
    unsigned order;
    double weight;

    bool operator==(const DiracAtom&) const = default;
};

/// weight * rate * exp(rate * (v - lower)) dv on (lower, upper). upper may be
/// +infinity as long as the component pairs finitely with Gaussian tails.
struct ExpComponent {
    double rate;
    double lower;
    double upper;
    double weight;

    bool operator==(const ExpComponent&) const = default;
};

/// Finite combination of Dirac-derivative atoms and exponential densities,
/// attached to a horizon T. Immutable after construction.
class ImageMeasure {
public:
    /// Throws DomainError if the measure is empty, the horizon is not
    /// positive, or a component is malformed.
    ImageMeasure(std::vector<DiracAtom> atoms, std::vector<ExpComponent> exp_components, double horizon);

    const std::vector<DiracAtom>& atoms() const noexcept { return atoms_; }
    const std::vector<ExpComponent>& exp_components() const noexcept { return exp_components_; }
    double horizon() const noexcept { return horizon_; }

    /// Smallest point of the support (atom locations and component lower ends).
    double support_min() const;

    /// The distributional derivative: atom orders go up by one, exponential
    /// components become rate * (component) plus jump atoms at their ends.
    ImageMeasure derivative() const;

    /// Translate every location by h.
    ImageMeasure shifted(double h) const;

    /// Same measure with a different horizon.
    ImageMeasure with_horizon(double horizon) const;

    /// Concatenation (the sum of the two distributions). Horizons must agree.
    friend ImageMeasure operator+(const ImageMeasure& lhs, const ImageMeasure& rhs);

    bool operator==(const ImageMeasure&) const = default;

private:
    std::vector<DiracAtom> atoms_;
    std::vector<ExpComponent> exp_components_;
    double horizon_;
};

/// Integral of N((u - v) / sqrt(remaining)) against the measure, remaining > 0.
double u_functional(const ImageMeasure& m, double u, double remaining);

/// U(u, t; m): Gaussian smoothing of m from time t to the horizon. Zero for
/// t >= horizon.
double u_eval(const ImageMeasure& m, double u, double t);

/// U(u, t; m') for the distributional derivative m'.
double u_eval_derivative(const ImageMeasure& m, double u, double t);

/// Integral of N2(x, -v / sqrt(T); rho) dm(v) with T = m.horizon(), |rho| < 1.
double n2_pairing(const ImageMeasure& m, double x, double rho);

/// Integral of N2(x, v / sqrt(T); rho) dm(v), atoms only.
double n2_pairing_mirror(const ImageMeasure& m, double x, double rho);

struct IdentityReport {
    double max_abs_deviation = 0.0;  ///< max over the grid of |U(g(t), t) - 1|
    double worst_time = 0.0;
    double empirical_bound = 0.0;    ///< max |U(w, t)| over sampled w <= g(t)
    /// Ratio of the sampled bound near the horizon to the bound at the
    /// start of the grid; large values indicate U blowing up as t -> T.
    double bound_growth = 1.0;
    bool bounded = true;
};

/// Growth factor above which verify_barrier_identity reports the sampled
/// bound as unbounded.
inline constexpr double kBoundGrowthLimit = 4.0;

/// Checks U(g(t), t; m) = 1 over the grid and samples |U(w, t; m)| for
/// w <= g(t). Grid times must lie in [0, horizon).
IdentityReport verify_barrier_identity(const ImageMeasure& m, const std::function<double(double)>& g,
                                       std::span<const double> grid);

/// n times in [0, T (1 - min_fraction)] with T - t log-spaced, starting at 0.
std::vector<double> remaining_time_grid(double horizon, std::size_t n, double min_fraction = 1e-6);

}  // namespace bcross
