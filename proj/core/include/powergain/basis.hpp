#pragma once

// Numerical kernel: normalized Hermite polynomials, their scaled families, the
// normal density and CDF, and closed-interval integrals of the basis.

#include <span>

namespace powergain::basis {

/// Highest Hermite degree accepted anywhere in the library.
inline constexpr int kMaxDegree = 64;

/// Normalized probabilists' Hermite polynomial He_j(x), orthonormal under the
/// standard normal density. Evaluated by the three-term recurrence
///   He_{j+1}(x) = (x He_j(x) - sqrt(j) He_{j-1}(x)) / sqrt(j+1).
/// Throws DomainError when j < 0 or j > kMaxDegree.
double hermite(int j, double x);

/// Fills out[j] = He_j(x) * weight for j = 0 .. out.size()-1.
///
/// The recurrence is linear, so running it on the weighted values directly
/// keeps Hermite-function products like He_j(x) * phi(x) bounded even where
/// He_j(x) alone would overflow. A zero weight yields all zeros.
void hermite_series(double x, double weight, std::span<double> out);

/// Density of N(0, variance) at x. Throws DomainError unless variance > 0.
double gaussian_pdf(double x, double variance);

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse of normal_cdf. Throws DomainError unless p is in (0, 1).
double normal_quantile(double p);

/// Probability that |h + Z| > cv for Z ~ N(0, 1). Symmetric in h.
double conditional_power(double h, double cv);

/// d/dh of conditional_power(h, cv).
double conditional_power_derivative(double h, double cv);

enum class Family {
  Psi,  ///< psi_j(t) = He_j(t / sigma_T)
  Phi,  ///< phi_j(t) = He_j(t / sqrt(1 + sigma_T^2 - c^-2))
  Chi,  ///< chi_j(h) = He_j(h / sqrt(1 + sigma_T^2))
};

/// The three scaled Hermite families for a given sigma_T^2 and scale factor c.
struct ScaledBasisFamily {
  double sigma_t2 = 1.0;
  double c = 1.0;

  /// Throws DomainError unless sigma_t2 > 0 and c >= 1.
  void validate() const;

  /// Argument divisor for the family, e.g. sigma_T for Psi.
  [[nodiscard]] double scale(Family family) const;

  /// Variance of the Gaussian weight in the family's inner product.
  [[nodiscard]] double weight_variance(Family family) const;

  [[nodiscard]] double evaluate(Family family, int j, double x) const;
};

/// Integral of the family's j-th basis polynomial over [-half_width, half_width].
/// Gauss–Legendre with j/2 + 1 nodes, so exact for the polynomial integrand;
/// exactly zero for odd j.
double integrate_basis(int j, Family family, double half_width, const ScaledBasisFamily& params);

}  // namespace powergain::basis
