#pragma once

// Influence function of the publication-bias-corrected estimator, its
// cluster-robust variance, confidence intervals, and a two-sample test.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "powergain/estimator.hpp"
#include "powergain/pubbias.hpp"
#include "powergain/spectrum.hpp"

namespace powergain {

/// Partition of observation indices into independent clusters (studies).
/// Observations in one cluster may be arbitrarily dependent.
class ClusterMap {
 public:
  ClusterMap() = default;

  /// One cluster per distinct identifier, in order of first appearance.
  static ClusterMap from_ids(std::span<const std::string> ids);
  static ClusterMap singletons(std::size_t n);
  static ClusterMap single_block(std::size_t n);

  [[nodiscard]] std::size_t observations() const { return cluster_of_.size(); }
  [[nodiscard]] std::size_t count() const { return blocks_.size(); }
  [[nodiscard]] std::size_t max_block_size() const;
  [[nodiscard]] const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  [[nodiscard]] std::size_t cluster_of(std::size_t i) const { return cluster_of_.at(i); }
  [[nodiscard]] bool same_cluster(std::size_t i, std::size_t k) const {
    return cluster_of(i) == cluster_of(k);
  }

 private:
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> cluster_of_;
};

/// Plug-in quantities entering the feasible influence function.
struct InfluenceIngredients {
  bool models_selection = true;  ///< false: no publication-bias step, m(t) = S(t)
  double theta = 1.0;
  double F_hat = 0.0;
  double B_plus = 0.0;
  double B_minus = 0.0;
  double Q_hat = 0.0;
  double epsilon = 0.0;
  double cutoff = 1.96;
};

/// W(t; theta, p) = (1 + (1/theta - 1) 1{|t| < cutoff}) / (1 + (1/theta - 1) p),
/// evaluated in the theta-multiplied form so that theta = 0 stays finite.
double selection_weight_W(double t, double theta, double p, double cutoff);

/// Influence of 1/theta_hat:
/// X(t) = 1{|t| in (cut, cut+eps]} / B- - B+ / (B-)^2 1{|t| in (cut-eps, cut]}.
/// Throws EstimationError when B- == 0.
double caliper_influence_X(double t, double b_plus, double b_minus, double epsilon, double cutoff);

/// Q_hat = mean_i S(t_i) (1{|t_i| < cut} - F) / (1 + F (1/theta - 1))^2.
double q_hat(std::span<const double> t, const ThetaEstimate& theta, const SpectralBasis& basis);

InfluenceIngredients make_ingredients(std::span<const double> t, const ThetaEstimate& theta,
                                      const SpectralBasis& basis);
InfluenceIngredients ingredients_without_selection(double cutoff);

/// m(t) = S(t) W(t; theta, F) + Q X(t).
double influence(double t, const InfluenceIngredients& ing, const SpectralBasis& basis);
std::vector<double> influence_values(std::span<const double> t, const InfluenceIngredients& ing,
                                     const SpectralBasis& basis);

/// (1/n^2) sum_{i,k} Lambda_ik (m_i - m_bar)(m_k - m_bar), evaluated as the sum
/// of squared centred block totals, so it is non-negative by construction.
/// A single block spanning the sample gives exactly 0.
double clustered_variance(std::span<const double> m, const ClusterMap& clusters);

double variance_hat(std::span<const double> t, const ClusterMap& clusters,
                    const InfluenceIngredients& ing, const SpectralBasis& basis);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// delta +- z_{1 - alpha/2} sqrt(v_hat). Throws DomainError on negative v_hat.
Interval confidence_interval(double delta, double v_hat, double alpha);

/// Two-sided p-value of H0: equal power gains in two independent samples.
double equality_test(double delta_a, double se_a, double delta_b, double se_b);
double equality_test(const EstimateReport& a, const EstimateReport& b);

}  // namespace powergain
