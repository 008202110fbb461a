#include "bcross/image_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcross/errors.hpp"
#include "bcross/special_fns.hpp"

namespace bcross {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// e^a * (N(hi) - N(lo)) for lo <= hi, kept finite when both tails are tiny.
double exp_times_norm_diff(double a, double lo, double hi) {
    if (hi <= 0.0) {
        const double top = std::exp(a + log_norm_cdf(hi));
        return lo == -kInf ? top : top - std::exp(a + log_norm_cdf(lo));
    }
    if (lo >= 0.0) {
        const double top = std::exp(a + log_norm_cdf(-lo));
        return hi == kInf ? top : top - std::exp(a + log_norm_cdf(-hi));
    }
    return std::exp(a) * (norm_cdf(hi) - norm_cdf(lo));
}

double binomial(unsigned n, unsigned k) {
    double c = 1.0;
    for (unsigned i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

// d^n/dy^n N2(x, y; rho) for n >= 1, |rho| < 1.
double n2_y_derivative(unsigned n, double x, double y, double rho) {
    const double root = std::sqrt((1.0 - rho) * (1.0 + rho));
    const double alpha = x / root;
    const double beta = -rho / root;
    const double z = alpha + beta * y;
    double sum = 0.0;
    double beta_pow = 1.0;
    for (unsigned j = 0; j < n; ++j) {
        sum += binomial(n - 1, j) * norm_pdf_deriv(n - j, y) * beta_pow * norm_pdf_deriv(j, z);
        beta_pow *= beta;
    }
    return sum;
}

double exp_component_u(const ExpComponent& c, double u, double s) {
    if (c.rate == 0.0 || c.weight == 0.0) return 0.0;
    const double r = c.rate;
    double boundary = -norm_cdf((u - c.lower) / s);
    if (c.upper != kInf) boundary += std::exp(r * (c.upper - c.lower) + log_norm_cdf((u - c.upper) / s));
    const double shift = r * s;
    const double interior = exp_times_norm_diff(r * (u - c.lower) + 0.5 * shift * shift, (c.lower - u) / s - shift,
                                                c.upper == kInf ? kInf : (c.upper - u) / s - shift);
    return c.weight * (boundary + interior);
}

double exp_component_n2(const ExpComponent& c, double x, double rho, double horizon) {
    if (c.rate == 0.0 || c.weight == 0.0) return 0.0;
    const Correlation corr(rho);
    const double sqrt_t = std::sqrt(horizon);
    const double k = c.rate * sqrt_t;
    double value = -c.weight * bivariate_norm_cdf(x, -c.lower / sqrt_t, corr);
    if (c.upper != kInf) {
        value += c.weight * std::exp(c.rate * (c.upper - c.lower)) * bivariate_norm_cdf(x, -c.upper / sqrt_t, corr);
    }
    const double y = x + rho * k;
    const double lower_term = bivariate_norm_cdf(k - c.lower / sqrt_t, y, corr);
    const double upper_term = c.upper == kInf ? 0.0 : bivariate_norm_cdf(k - c.upper / sqrt_t, y, corr);
    value += c.weight * std::exp(0.5 * k * k - c.rate * c.lower) * (lower_term - upper_term);
    return value;
}

}  // namespace

ImageMeasure::ImageMeasure(std::vector<DiracAtom> atoms, std::vector<ExpComponent> exp_components, double horizon)
    : atoms_(std::move(atoms)), exp_components_(std::move(exp_components)), horizon_(horizon) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw DomainError("image measure horizon must be positive");
    if (atoms_.empty() && exp_components_.empty()) throw DomainError("image measure needs at least one component");
    for (const auto& a : atoms_) {
        if (!std::isfinite(a.location) || !std::isfinite(a.weight)) throw DomainError("atom must be finite");
    }
    for (const auto& c : exp_components_) {
        if (!std::isfinite(c.rate) || !std::isfinite(c.weight) || !std::isfinite(c.lower)) {
            throw DomainError("exponential component needs finite rate, weight and lower end");
        }
        if (!(c.upper > c.lower) || c.upper == -kInf) throw DomainError("exponential component needs lower < upper");
    }
}

double ImageMeasure::support_min() const {
    double lo = kInf;
    for (const auto& a : atoms_) lo = std::min(lo, a.location);
    for (const auto& c : exp_components_) lo = std::min(lo, c.lower);
    return lo;
}

ImageMeasure ImageMeasure::derivative() const {
    std::vector<DiracAtom> atoms;
    std::vector<ExpComponent> comps;
    atoms.reserve(atoms_.size() + 2 * exp_components_.size());
    for (const auto& a : atoms_) atoms.push_back({a.location, a.order + 1, a.weight});
    for (const auto& c : exp_components_) {
        const double jump = c.weight * c.rate;
        if (jump == 0.0) continue;
        comps.push_back({c.rate, c.lower, c.upper, jump});
        atoms.push_back({c.lower, 0, jump});
        if (c.upper != kInf) atoms.push_back({c.upper, 0, -jump * std::exp(c.rate * (c.upper - c.lower))});
    }
    if (atoms.empty() && comps.empty()) atoms.push_back({support_min(), 0, 0.0});
    return ImageMeasure(std::move(atoms), std::move(comps), horizon_);
}

ImageMeasure ImageMeasure::shifted(double h) const {
    auto atoms = atoms_;
    auto comps = exp_components_;
    for (auto& a : atoms) a.location += h;
    for (auto& c : comps) {
        c.lower += h;
        c.upper += h;
    }
    return ImageMeasure(std::move(atoms), std::move(comps), horizon_);
}

ImageMeasure ImageMeasure::with_horizon(double horizon) const { return ImageMeasure(atoms_, exp_components_, horizon); }

ImageMeasure operator+(const ImageMeasure& lhs, const ImageMeasure& rhs) {
    if (lhs.horizon_ != rhs.horizon_) throw DomainError("cannot add image measures with different horizons");
    auto atoms = lhs.atoms_;
    atoms.insert(atoms.end(), rhs.atoms_.begin(), rhs.atoms_.end());
    auto comps = lhs.exp_components_;
    comps.insert(comps.end(), rhs.exp_components_.begin(), rhs.exp_components_.end());
    return ImageMeasure(std::move(atoms), std::move(comps), lhs.horizon_);
}

double u_functional(const ImageMeasure& m, double u, double remaining) {
    if (!(remaining > 0.0)) throw DomainError("u_functional needs positive remaining time");
    const double s = std::sqrt(remaining);
    double total = 0.0;
    for (const auto& a : m.atoms()) {
        total += a.weight * std::pow(s, -static_cast<double>(a.order)) * norm_pdf_deriv(a.order, (u - a.location) / s);
    }
    for (const auto& c : m.exp_components()) total += exp_component_u(c, u, s);
    return total;
}

double u_eval(const ImageMeasure& m, double u, double t) {
    if (t >= m.horizon()) return 0.0;
    return u_functional(m, u, m.horizon() - t);
}

double u_eval_derivative(const ImageMeasure& m, double u, double t) { return u_eval(m.derivative(), u, t); }

double n2_pairing(const ImageMeasure& m, double x, double rho) {
    if (!(std::abs(rho) < 1.0)) throw DomainError("n2_pairing needs |rho| < 1");
    const double sqrt_t = std::sqrt(m.horizon());
    const Correlation corr(rho);
    double total = 0.0;
    for (const auto& a : m.atoms()) {
        const double y = -a.location / sqrt_t;
        if (a.order == 0) {
            total += a.weight * bivariate_norm_cdf(x, y, corr);
        } else {
            total += a.weight * std::pow(sqrt_t, -static_cast<double>(a.order)) * n2_y_derivative(a.order, x, y, rho);
        }
    }
    for (const auto& c : m.exp_components()) total += exp_component_n2(c, x, rho, m.horizon());
    return total;
}

double n2_pairing_mirror(const ImageMeasure& m, double x, double rho) {
    if (!(std::abs(rho) < 1.0)) throw DomainError("n2_pairing_mirror needs |rho| < 1");
    if (!m.exp_components().empty()) throw DomainError("n2_pairing_mirror supports atoms only");
    const double sqrt_t = std::sqrt(m.horizon());
    const Correlation corr(rho);
    double total = 0.0;
    for (const auto& a : m.atoms()) {
        const double y = a.location / sqrt_t;
        if (a.order == 0) {
            total += a.weight * bivariate_norm_cdf(x, y, corr);
        } else {
            const double sign = a.order % 2 == 0 ? 1.0 : -1.0;
            total += sign * a.weight * std::pow(sqrt_t, -static_cast<double>(a.order)) *
                     n2_y_derivative(a.order, x, y, rho);
        }
    }
    return total;
}

IdentityReport verify_barrier_identity(const ImageMeasure& m, const std::function<double(double)>& g,
                                       std::span<const double> grid) {
    IdentityReport report;
    if (grid.empty()) return report;
    const double horizon = m.horizon();
    const std::size_t edge = std::max<std::size_t>(1, grid.size() / 10);
    double early = 0.0;
    double late = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (!(t >= 0.0 && t < horizon)) throw DomainError("identity grid must lie in [0, horizon)");
        const double gt = g(t);
        const double dev = std::abs(u_eval(m, gt, t) - 1.0);
        if (dev > report.max_abs_deviation || std::isnan(dev)) {
            report.max_abs_deviation = dev;
            report.worst_time = t;
        }

        const double s = std::sqrt(horizon - t);
        double local = 0.0;
        auto probe = [&](double w) {
            if (w <= gt) local = std::max(local, std::abs(u_eval(m, w, t)));
        };
        probe(gt);
        for (int k = -3; k <= 4; ++k) probe(gt - s * std::ldexp(1.0, k));
        for (int k = -2; k <= 1; ++k) probe(gt - std::pow(10.0, k));
        for (const auto& a : m.atoms()) probe(a.location);
        for (const auto& c : m.exp_components()) probe(c.lower);

        report.empirical_bound = std::max(report.empirical_bound, local);
        if (i < edge) early = std::max(early, local);
        if (i + edge >= grid.size()) late = std::max(late, local);
    }
    report.bound_growth = late / std::max(early, 1e-300);
    report.bounded = std::isfinite(report.empirical_bound) && report.bound_growth <= kBoundGrowthLimit;
    return report;
}

std::vector<double> remaining_time_grid(double horizon, std::size_t n, double min_fraction) {
    std::vector<double> grid(n);
    if (n == 0) return grid;
    if (n == 1) {
        grid[0] = 0.0;
        return grid;
    }
    const double decades = -std::log10(min_fraction);
    for (std::size_t i = 0; i < n; ++i) {
        const double frac = std::pow(10.0, -decades * static_cast<double>(i) / static_cast<double>(n - 1));
        grid[i] = horizon * (1.0 - frac);
    }
    grid[0] = 0.0;
    return grid;
}

}  // namespace bcross
