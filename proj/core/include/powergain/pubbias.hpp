#pragma once

// Caliper publication-bias model: insignificant scores (|t| < cutoff) are
// published with probability theta relative to significant ones.

#include <cstddef>
#include <span>

namespace powergain {

struct CaliperModel {
  double theta = 1.0;    ///< relative reporting probability of |t| < cutoff; not capped at 1
  double cutoff = 1.96;
};

/// w(t) = theta for |t| < cutoff and 1 for |t| >= cutoff. Throws DomainError if theta <= 0.
double weight(double t, const CaliperModel& model);

/// Fraction of observations with |t_i| <= x. Throws DomainError on an empty sample.
double empirical_cdf_abs(std::span<const double> t, double x);

/// Caliper bin counts around the cutoff, in |t|:
/// below = (cutoff - eps, cutoff], above = (cutoff, cutoff + eps].
struct EmpiricalTail {
  std::size_t n = 0;
  std::size_t count_below = 0;
  std::size_t count_above = 0;
  double F_at_cutoff = 0.0;  ///< empirical CDF of |t| at the cutoff
  double B_plus = 0.0;       ///< count_above / n
  double B_minus = 0.0;      ///< count_below / n
};

EmpiricalTail empirical_tail(std::span<const double> t, double epsilon, double cutoff);

struct ThetaEstimate {
  double theta = 1.0;
  double epsilon = 0.0;
  double cutoff = 1.96;
  EmpiricalTail tail;

  /// theta == 0: no score in the lower bin. The point estimate is still
  /// defined; the influence function is not.
  [[nodiscard]] bool lower_bin_empty() const { return tail.count_below == 0; }
};

/// theta_hat = count_below / count_above.
/// Throws EstimationError ("caliper denominator empty") when the upper bin is
/// empty, DomainError for an empty sample or epsilon <= 0.
ThetaEstimate estimate_theta(std::span<const double> t, double epsilon, double cutoff);

}  // namespace powergain
