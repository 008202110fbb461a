#pragma once

#include <cstdint>

namespace bcross {

// Standard normal distribution N, its density and its derivatives.

/// N(x), the standard normal CDF. NaN propagates.
double norm_cdf(double x);

/// log N(x), accurate deep in the lower tail where N(x) underflows.
double log_norm_cdf(double x);

/// N'(x) = exp(-x^2/2) / sqrt(2 pi).
double norm_pdf(double x);

/// k-th derivative N^(k)(x). k = 0 is N itself, k = 1 the density, and for
/// k >= 1 the value is (-1)^(k-1) H_(k-1)(x) N'(x).
double norm_pdf_deriv(unsigned k, double x);

/// Correlation coefficient of a standard bivariate normal pair, |rho| <= 1.
class Correlation {
public:
    /// Throws DomainError when rho is outside [-1, 1] or NaN.
    explicit Correlation(double rho);
    double value() const noexcept { return rho_; }

private:
    double rho_;
};

/// N2(x, y; rho) = P(X <= x, Y <= y) for a standard bivariate normal pair.
///
/// Uses Genz's Gauss-Legendre scheme for the Drezner-Wesolowsky correlation
/// integral; the rho = +-1 limits are handled in closed form. The arguments
/// are put in canonical order first so the result is exactly symmetric in
/// (x, y).
double bivariate_norm_cdf(double x, double y, Correlation rho);

// Probabilists' Hermite polynomials, d^n/dx^n exp(-x^2/2) = (-1)^n H_n(x) exp(-x^2/2).

/// H_n(x) through the three-term recurrence H_(n+1) = x H_n - n H_(n-1).
double hermite_eval(unsigned n, double x);

/// Largest zero z_n of H_n, n >= 1. Throws DomainError for n = 0.
double hermite_largest_zero(unsigned n);

class HermitePoly {
public:
    explicit HermitePoly(unsigned order) : order_(order) {}
    unsigned order() const noexcept { return order_; }
    double operator()(double x) const { return hermite_eval(order_, x); }
    /// H_n'(x) = n H_(n-1)(x).
    double derivative(double x) const;
    double largest_zero() const { return hermite_largest_zero(order_); }

private:
    unsigned order_;
};

// Lambert W on the real line.

enum class LambertBranch { principal, lower };

/// Solves w e^w = x. Principal branch: x >= -1/e, result >= -1.
/// Lower branch: -1/e <= x < 0, result <= -1. Throws DomainError outside.
double lambert_w(LambertBranch branch, double x);

/// Lower-branch W evaluated from log(-x); usable when -x underflows.
/// Requires log_neg_x <= -1 (that is x >= -1/e).
double lambert_w_lower_from_log(double log_neg_x);

}  // namespace bcross
