#pragma once

// End-to-end estimation: tuning, publication-bias correction, point estimate,
// cluster-robust standard error and confidence interval.

#include <span>
#include <vector>

#include "powergain/estimator.hpp"
#include "powergain/sample.hpp"
#include "powergain/spectrum.hpp"

namespace powergain {

/// Which count drives the tuning rule for J and epsilon. The estimator always
/// runs over every t-score.
enum class ScaleBy { TScores, Studies };

struct EstimateOptions {
  bool publication_bias = true;
  ScaleBy scale_by = ScaleBy::TScores;
  bool clamp_ci_at_zero = false;  ///< reporting only: truncate the interval at 0
};

/// cfg.n_effective is ignored and derived from the sample and scale_by.
/// Throws DomainError on invalid input, EstimationError when the caliper
/// estimator is undefined (empty upper bin).
EstimateReport estimate_power_gain(const TScoreSample& sample, const TuningConfig& cfg,
                                   const EstimateOptions& options = {});

struct CurvePoint {
  double c2 = 0.0;
  double delta = 0.0;
  double std_error = 0.0;  ///< pointwise
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Power gain over a grid of sample-size multipliers c^2. J, epsilon and
/// theta_hat do not depend on c and are shared; each point equals what
/// estimate_power_gain reports at that c.
std::vector<CurvePoint> power_gain_curve(const TScoreSample& sample, const TuningConfig& cfg,
                                         std::span<const double> c2_grid,
                                         const EstimateOptions& options = {});

}  // namespace powergain
