#pragma once

// Singular values of the two Gaussian convolution operators, the spectral
// cutoff coefficients a_j, the summed kernel S(t), and the tuning rule.

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace powergain {

struct TuningConfig {
  double c = std::numbers::sqrt2;  ///< counterfactual scale; sample sizes grow by c^2
  double cv = 1.96;                ///< critical value of the two-sided test
  double alpha = 0.05;             ///< confidence-interval level
  double sigma_t2 = 1.0;           ///< reference variance sigma_T^2
  double const_c = 2.0;            ///< caliper half-width constant: eps = C n^(-1/3)
  double const_d = 0.05;           ///< cutoff constant in the J rule
  std::size_t n_effective = 0;     ///< count driving the tuning rule

  /// Throws DomainError on out-of-range fields (n_effective is checked by select_tuning).
  void validate() const;
};

struct SingularValues {
  double eta = 1.0;
  double lambda = 1.0;
};

/// eta_j = ((1 + s - c^-2) / (1 + s))^(j/2), lambda_j = (s / (s + 1 - c^-2))^(j/2), s = sigma_T^2.
SingularValues singular_values(int j, const TuningConfig& cfg);

/// a_j = int_{-cv}^{cv} psi_j - (1 / lambda_j) int_{-cv/c}^{cv/c} phi_j.
/// Zero for odd j and for every j when c == 1.
double a_coefficient(int j, const TuningConfig& cfg);

struct Tuning {
  int J = 0;
  double epsilon = 0.0;
};

/// eps = C n^(-1/3); J = floor(log(D n^(-1/3)) / log(sqrt(s / (1 + s)))), clamped to
/// [0, kMaxDegree]. Throws DomainError if n_effective < 2.
Tuning select_tuning(const TuningConfig& cfg);

/// Precomputed eta, lambda and a for j = 0..J at a fixed (c, cv, sigma_T^2).
/// Immutable after construction.
class SpectralBasis {
 public:
  SpectralBasis(const TuningConfig& cfg, int J);

  [[nodiscard]] int J() const { return J_; }
  [[nodiscard]] double c() const { return c_; }
  [[nodiscard]] double cv() const { return cv_; }
  [[nodiscard]] double sigma_t2() const { return sigma_t2_; }
  [[nodiscard]] std::span<const double> eta() const { return eta_; }
  [[nodiscard]] std::span<const double> lambda() const { return lambda_; }
  [[nodiscard]] std::span<const double> a() const { return a_; }

  /// True when c == 1; every a_j is then exactly zero.
  [[nodiscard]] bool trivial() const { return c_ == 1.0; }

  /// out[j] = psi_j(t) * N(0, sigma_T^2) density at t, for j = 0..J.
  void weighted_psi(double t, std::span<double> out) const;

  /// S(t) = sum_j a_j psi_j(t) phi_{sigma_T^2}(t). Even in t.
  [[nodiscard]] double kernel(double t) const;

 private:
  int J_;
  double c_;
  double cv_;
  double sigma_t2_;
  std::vector<double> eta_;
  std::vector<double> lambda_;
  std::vector<double> a_;
};

inline double kernel_S(double t, const SpectralBasis& basis) { return basis.kernel(t); }

}  // namespace powergain
