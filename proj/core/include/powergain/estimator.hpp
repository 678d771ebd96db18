#pragma once

// Point estimators of the counterfactual power gain.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powergain/pubbias.hpp"
#include "powergain/sample.hpp"
#include "powergain/spectrum.hpp"

namespace powergain {

/// Fraction of |t_i| strictly above cv.
double status_quo_power(std::span<const double> t, double cv);

/// Fraction of c |t_i| above cv. Not an estimator of counterfactual power;
/// kept as the textbook negative control (it converges to Pr(|cT| > cv)).
double naive_rescaled_power(std::span<const double> t, double c, double cv);

/// Publication-bias reweighted sample moments
///   m_j = sum_i v_i psi_j(t_i) phi(t_i) / sum_i v_i,  v_i = theta / w_theta(t_i),
/// i.e. v_i = 1 inside the caliper and theta outside. theta = 1 gives plain means.
std::vector<double> sample_moments(std::span<const double> t, const SpectralBasis& basis,
                                   double theta = 1.0, double cutoff = 1.96);

/// Spectral-cutoff estimator without publication bias: sum_j a_j m_j.
double delta_hat(std::span<const double> t, const SpectralBasis& basis);

/// Same estimator with moments reweighted for a given theta.
double delta_hat_weighted(std::span<const double> t, const SpectralBasis& basis, double theta,
                          double cutoff);

struct PbEstimate {
  double delta = 0.0;
  ThetaEstimate theta;
};

/// Estimates theta with half-width epsilon around basis.cv(), then reweights.
/// Propagates EstimationError from estimate_theta.
PbEstimate delta_hat_pb(std::span<const double> t, const SpectralBasis& basis, double epsilon);

/// Everything a single estimation run reports.
struct EstimateReport {
  double delta_hat = 0.0;
  std::optional<double> theta_hat;        ///< empty when publication bias was not modelled
  std::optional<double> theta_std_error;  ///< delta-method SE of theta_hat
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool ci_clamped = false;

  double c = 0.0;
  double cv = 1.96;
  double alpha = 0.05;
  double sigma_t2 = 1.0;
  double const_c = 2.0;
  double const_d = 0.05;
  std::string scale_by = "tscores";

  int J = 0;
  double epsilon = 0.0;
  std::size_t n = 0;
  std::size_t n_effective = 0;
  std::size_t n_clusters = 0;
  std::size_t max_cluster_size = 0;
  double status_quo_power = 0.0;

  std::optional<double> B_plus;
  std::optional<double> B_minus;
  std::optional<double> Q_hat;
  std::vector<std::string> diagnostics;

  [[nodiscard]] double c2() const { return c * c; }
};

/// Reweighted moments divided by eta_j lambda_j: the coefficients of the
/// deconvolved prior pi_hat(h) = sum_j coef_j chi_j(h). Since eta_j lambda_j =
/// (s / (1 + s))^(j/2) the coefficients do not depend on c; one reconstruction
/// serves every counterfactual scale.
class PriorReconstruction {
 public:
  PriorReconstruction(std::vector<double> moments, double sigma_t2, double cv, double anchor_c);

  [[nodiscard]] int J() const { return static_cast<int>(moments_.size()) - 1; }
  [[nodiscard]] std::span<const double> moments() const { return moments_; }
  [[nodiscard]] std::span<const double> coefficients() const { return coefficients_; }
  [[nodiscard]] double sigma_t2() const { return sigma_t2_; }
  [[nodiscard]] double cv() const { return cv_; }
  [[nodiscard]] double anchor_c() const { return anchor_c_; }

  /// pi_hat(h). A truncated polynomial series; it can be negative.
  [[nodiscard]] double density(double h) const;

  /// <chi_j, pi_hat>_H by Gauss–Hermite quadrature of the reconstruction.
  [[nodiscard]] double chi_projection(int j) const;

  /// Power gain at scale c by integrating pi_hat against the singular
  /// decomposition: sum_j eta_j <chi_j, pi_hat>_H (lambda_j I_psi,j - I_phi,j).
  [[nodiscard]] double delta_at(double c) const;

 private:
  std::vector<double> moments_;
  std::vector<double> coefficients_;
  double sigma_t2_;
  double cv_;
  double anchor_c_;
};

PriorReconstruction reconstruct_prior(std::span<const double> t, const SpectralBasis& basis,
                                      double theta_hat, double cutoff);

struct DensityPair {
  double f_T = 0.0;   ///< truncated series estimate of the factual t-score density
  double f_Tc = 0.0;  ///< same for the counterfactual density; may be negative (Gibbs)
};

/// f_T(t) = sum_j psi_j(t) m_j, f_Tc(t) = sum_j phi_j(t/c) m_j / (c lambda_j), at the
/// reconstruction's anchor c (or the given one).
DensityPair reconstruct_densities(const PriorReconstruction& prior, double t);
DensityPair reconstruct_densities(const PriorReconstruction& prior, double t, double c);

/// One replication design (e.g. one treatment run at many sites).
struct ConditionalGroup {
  std::vector<double> effects;
  std::vector<double> std_errors;
  std::vector<double> weights;
  std::vector<std::string> sites;  ///< optional; needed for the worst-case SE
};

enum class ConditionalSe {
  Independent,  ///< estimation errors of all members independent
  WorstCase,    ///< members sharing a site perfectly correlated
};

struct ConditionalResult {
  double delta = 0.0;
  double std_error = 0.0;
  std::size_t members = 0;
};

/// Power gain conditional on in-sample true effects: per group the weighted
/// mean effect b_bar stands in for every member's true effect, and
///   delta = mean_i [power(c b_bar / s_i) - power(b_bar / s_i)].
/// SE by the delta method in b_bar, treating the s_i as known.
ConditionalResult conditional_delta(std::span<const ConditionalGroup> groups, double c, double cv,
                                    ConditionalSe se_mode = ConditionalSe::Independent);

}  // namespace powergain
