#include "powergain/inference.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "powergain/basis.hpp"
#include "powergain/errors.hpp"
#include "powergain/summation.hpp"

namespace powergain {

ClusterMap ClusterMap::from_ids(std::span<const std::string> ids) {
  ClusterMap map;
  map.cluster_of_.resize(ids.size());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, inserted] = index.try_emplace(ids[i], map.blocks_.size());
    if (inserted) map.blocks_.emplace_back();
    map.blocks_[it->second].push_back(i);
    map.cluster_of_[i] = it->second;
  }
  return map;
}

ClusterMap ClusterMap::singletons(std::size_t n) {
  ClusterMap map;
  map.blocks_.resize(n);
  map.cluster_of_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    map.blocks_[i] = {i};
    map.cluster_of_[i] = i;
  }
  return map;
}

ClusterMap ClusterMap::single_block(std::size_t n) {
  ClusterMap map;
  map.cluster_of_.assign(n, 0);
  if (n > 0) {
    map.blocks_.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) map.blocks_[0][i] = i;
  }
  return map;
}

std::size_t ClusterMap::max_block_size() const {
  std::size_t out = 0;
  for (const auto& b : blocks_) out = std::max(out, b.size());
  return out;
}

double selection_weight_W(double t, double theta, double p, double cutoff) {
  const double numerator = std::abs(t) < cutoff ? 1.0 : theta;
  return numerator / (theta + (1.0 - theta) * p);
}

double caliper_influence_X(double t, double b_plus, double b_minus, double epsilon, double cutoff) {
  if (!(b_minus > 0.0)) {
    throw EstimationError("influence undefined: lower caliper bin is empty (B- = 0)");
  }
  const double a = std::abs(t);
  if (a > cutoff && a <= cutoff + epsilon) return 1.0 / b_minus;
  if (a > cutoff - epsilon && a <= cutoff) return -b_plus / (b_minus * b_minus);
  return 0.0;
}

double q_hat(std::span<const double> t, const ThetaEstimate& theta, const SpectralBasis& basis) {
  if (t.empty()) throw DomainError("q_hat: empty sample");
  const double th = theta.theta;
  const double F = theta.tail.F_at_cutoff;
  const double scale = th + F * (1.0 - th);
  // theta = 0 with nothing inside the cutoff: every summand vanishes
  if (scale == 0.0) return 0.0;
  const double factor = (th * th) / (scale * scale);
  CompensatedSum acc;
  for (double ti : t) {
    const double inside = std::abs(ti) < theta.cutoff ? 1.0 : 0.0;
    acc.add(basis.kernel(ti) * (inside - F));
  }
  return acc.value() / static_cast<double>(t.size()) * factor;
}

InfluenceIngredients make_ingredients(std::span<const double> t, const ThetaEstimate& theta,
                                      const SpectralBasis& basis) {
  InfluenceIngredients ing;
  ing.models_selection = true;
  ing.theta = theta.theta;
  ing.F_hat = theta.tail.F_at_cutoff;
  ing.B_plus = theta.tail.B_plus;
  ing.B_minus = theta.tail.B_minus;
  ing.epsilon = theta.epsilon;
  ing.cutoff = theta.cutoff;
  ing.Q_hat = q_hat(t, theta, basis);
  return ing;
}

InfluenceIngredients ingredients_without_selection(double cutoff) {
  InfluenceIngredients ing;
  ing.models_selection = false;
  ing.cutoff = cutoff;
  return ing;
}

double influence(double t, const InfluenceIngredients& ing, const SpectralBasis& basis) {
  const double s = basis.kernel(t);
  if (!ing.models_selection) return s;
  const double x = caliper_influence_X(t, ing.B_plus, ing.B_minus, ing.epsilon, ing.cutoff);
  return s * selection_weight_W(t, ing.theta, ing.F_hat, ing.cutoff) + ing.Q_hat * x;
}

std::vector<double> influence_values(std::span<const double> t, const InfluenceIngredients& ing,
                                     const SpectralBasis& basis) {
  if (ing.models_selection && !(ing.B_minus > 0.0)) {
    throw EstimationError("influence undefined: lower caliper bin is empty (B- = 0)");
  }
  std::vector<double> m(t.size());
  std::transform(t.begin(), t.end(), m.begin(), [&](double ti) { return influence(ti, ing, basis); });
  return m;
}

double clustered_variance(std::span<const double> m, const ClusterMap& clusters) {
  if (m.empty()) throw DomainError("clustered_variance: empty sample");
  if (clusters.observations() != m.size()) {
    throw DomainError("clustered_variance: cluster map does not match the sample size");
  }
  // centred values sum to zero over the whole sample
  if (clusters.count() <= 1) return 0.0;
  const auto n = static_cast<double>(m.size());
  const double mean = compensated_sum(m) / n;
  CompensatedSum total;
  for (const auto& block : clusters.blocks()) {
    CompensatedSum block_sum;
    for (std::size_t i : block) block_sum.add(m[i] - mean);
    const double b = block_sum.value();
    total.add(b * b);
  }
  return total.value() / (n * n);
}

double variance_hat(std::span<const double> t, const ClusterMap& clusters,
                    const InfluenceIngredients& ing, const SpectralBasis& basis) {
  return clustered_variance(influence_values(t, ing, basis), clusters);
}

Interval confidence_interval(double delta, double v_hat, double alpha) {
  if (v_hat < 0.0) throw DomainError("confidence_interval: negative variance");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("confidence_interval: alpha must lie in (0, 1)");
  const double half = basis::normal_quantile(1.0 - 0.5 * alpha) * std::sqrt(v_hat);
  return {delta - half, delta + half};
}

double equality_test(double delta_a, double se_a, double delta_b, double se_b) {
  if (se_a < 0.0 || se_b < 0.0) throw DomainError("equality_test: negative standard error");
  const double se = std::sqrt(se_a * se_a + se_b * se_b);
  if (se == 0.0) return delta_a == delta_b ? 1.0 : 0.0;
  const double z = (delta_a - delta_b) / se;
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

double equality_test(const EstimateReport& a, const EstimateReport& b) {
  return equality_test(a.delta_hat, a.std_error, b.delta_hat, b.std_error);
}

}  // namespace powergain
