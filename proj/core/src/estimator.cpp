#include "powergain/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "powergain/basis.hpp"
#include "powergain/errors.hpp"
#include "powergain/quadrature.hpp"
#include "powergain/summation.hpp"

namespace powergain {

void TScoreSample::validate() const {
  if (t.empty()) throw DomainError("t-score sample is empty");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) {
      throw DomainError("t-score " + std::to_string(i) + " is not finite");
    }
  }
  if (!study_id.empty() && study_id.size() != t.size()) {
    throw DomainError("study_id length does not match the number of t-scores");
  }
}

double status_quo_power(std::span<const double> t, double cv) {
  if (t.empty()) throw DomainError("status_quo_power: empty sample");
  std::size_t hits = 0;
  for (double v : t) hits += std::abs(v) > cv ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(t.size());
}

double naive_rescaled_power(std::span<const double> t, double c, double cv) {
  if (t.empty()) throw DomainError("naive_rescaled_power: empty sample");
  std::size_t hits = 0;
  for (double v : t) hits += c * std::abs(v) > cv ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(t.size());
}

std::vector<double> sample_moments(std::span<const double> t, const SpectralBasis& basis,
                                   double theta, double cutoff) {
  if (t.empty()) throw DomainError("sample_moments: empty sample");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw DomainError("sample_moments: bad theta");
  const auto size = static_cast<std::size_t>(basis.J()) + 1;
  std::vector<CompensatedSum> sums(size);
  CompensatedSum total_weight;
  std::vector<double> h(size);
  for (double ti : t) {
    const double v = std::abs(ti) < cutoff ? 1.0 : theta;
    basis.weighted_psi(ti, h);
    for (std::size_t j = 0; j < size; ++j) sums[j].add(v * h[j]);
    total_weight.add(v);
  }
  const double denom = total_weight.value();
  if (!(denom > 0.0)) throw EstimationError("sample_moments: all reweighting factors are zero");
  std::vector<double> moments(size);
  for (std::size_t j = 0; j < size; ++j) moments[j] = sums[j].value() / denom;
  return moments;
}

double delta_hat_weighted(std::span<const double> t, const SpectralBasis& basis, double theta,
                          double cutoff) {
  if (t.empty()) throw DomainError("delta_hat: empty sample");
  if (basis.trivial()) return 0.0;
  const auto moments = sample_moments(t, basis, theta, cutoff);
  const auto a = basis.a();
  CompensatedSum acc;
  for (std::size_t j = 0; j < moments.size(); ++j) acc.add(a[j] * moments[j]);
  return acc.value();
}

double delta_hat(std::span<const double> t, const SpectralBasis& basis) {
  return delta_hat_weighted(t, basis, 1.0, basis.cv());
}

PbEstimate delta_hat_pb(std::span<const double> t, const SpectralBasis& basis, double epsilon) {
  PbEstimate out;
  out.theta = estimate_theta(t, epsilon, basis.cv());
  out.delta = delta_hat_weighted(t, basis, out.theta.theta, basis.cv());
  return out;
}

PriorReconstruction::PriorReconstruction(std::vector<double> moments, double sigma_t2, double cv,
                                         double anchor_c)
    : moments_(std::move(moments)), sigma_t2_(sigma_t2), cv_(cv), anchor_c_(anchor_c) {
  if (moments_.empty()) throw DomainError("PriorReconstruction: no moments");
  if (moments_.size() > static_cast<std::size_t>(basis::kMaxDegree) + 1) {
    throw DomainError("PriorReconstruction: more moments than the degree cap allows");
  }
  if (!(sigma_t2_ > 0.0)) throw DomainError("PriorReconstruction: sigma_T^2 must be positive");
  const double ratio = std::sqrt(sigma_t2_ / (1.0 + sigma_t2_));
  coefficients_.resize(moments_.size());
  double eta_lambda = 1.0;
  for (std::size_t j = 0; j < moments_.size(); ++j) {
    coefficients_[j] = moments_[j] / eta_lambda;
    eta_lambda *= ratio;
  }
}

double PriorReconstruction::density(double h) const {
  const double x = h / std::sqrt(1.0 + sigma_t2_);
  std::vector<double> he(coefficients_.size());
  basis::hermite_series(x, 1.0, he);
  CompensatedSum acc;
  for (std::size_t j = 0; j < he.size(); ++j) acc.add(coefficients_[j] * he[j]);
  return acc.value();
}

double PriorReconstruction::chi_projection(int j) const {
  if (j < 0 || j > basis::kMaxDegree) throw DomainError("chi_projection: bad index");
  const auto nodes = static_cast<std::size_t>(std::max(j, J())) + 1;
  const auto rule = quadrature::gauss_hermite_normal(nodes);
  const double scale = std::sqrt(1.0 + sigma_t2_);
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double u = rule.nodes[i];
    acc.add(rule.weights[i] * basis::hermite(j, u) * density(scale * u));
  }
  return acc.value();
}

double PriorReconstruction::delta_at(double c) const {
  if (!(c >= 1.0)) throw DomainError("delta_at: c must be >= 1");
  if (c == 1.0) return 0.0;
  TuningConfig cfg;
  cfg.c = c;
  cfg.cv = cv_;
  cfg.sigma_t2 = sigma_t2_;
  const basis::ScaledBasisFamily family{sigma_t2_, c};
  CompensatedSum acc;
  for (int j = 0; j <= J(); ++j) {
    if (j % 2 == 1) continue;
    const auto sv = singular_values(j, cfg);
    const double factual = basis::integrate_basis(j, basis::Family::Psi, cv_, family);
    const double counterfactual = basis::integrate_basis(j, basis::Family::Phi, cv_ / c, family);
    acc.add(sv.eta * chi_projection(j) * (sv.lambda * factual - counterfactual));
  }
  return acc.value();
}

PriorReconstruction reconstruct_prior(std::span<const double> t, const SpectralBasis& basis,
                                      double theta_hat, double cutoff) {
  return PriorReconstruction(sample_moments(t, basis, theta_hat, cutoff), basis.sigma_t2(),
                             basis.cv(), basis.c());
}

DensityPair reconstruct_densities(const PriorReconstruction& prior, double t) {
  return reconstruct_densities(prior, t, prior.anchor_c());
}

DensityPair reconstruct_densities(const PriorReconstruction& prior, double t, double c) {
  TuningConfig cfg;
  cfg.c = c;
  cfg.cv = prior.cv();
  cfg.sigma_t2 = prior.sigma_t2();
  cfg.validate();
  const basis::ScaledBasisFamily family{prior.sigma_t2(), c};
  const auto m = prior.moments();
  CompensatedSum f_t;
  CompensatedSum f_tc;
  for (int j = 0; j <= prior.J(); ++j) {
    const double mj = m[static_cast<std::size_t>(j)];
    const double lambda = singular_values(j, cfg).lambda;
    f_t.add(family.evaluate(basis::Family::Psi, j, t) * mj);
    f_tc.add(family.evaluate(basis::Family::Phi, j, t / c) * mj / (c * lambda));
  }
  return {f_t.value(), f_tc.value()};
}

ConditionalResult conditional_delta(std::span<const ConditionalGroup> groups, double c, double cv,
                                    ConditionalSe se_mode) {
  if (groups.empty()) throw DomainError("conditional_delta: no groups");
  if (!(c >= 1.0)) throw DomainError("conditional_delta: c must be >= 1");
  if (!(cv > 0.0)) throw DomainError("conditional_delta: critical value must be positive");

  std::size_t total = 0;
  for (const auto& g : groups) {
    const std::size_t m = g.effects.size();
    if (m == 0) throw DomainError("conditional_delta: empty group");
    if (g.std_errors.size() != m || g.weights.size() != m) {
      throw DomainError("conditional_delta: effects, std_errors and weights differ in length");
    }
    if (!g.sites.empty() && g.sites.size() != m) {
      throw DomainError("conditional_delta: sites length does not match effects");
    }
    if (se_mode == ConditionalSe::WorstCase && g.sites.empty()) {
      throw DomainError("conditional_delta: worst-case SE needs a site for every member");
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (!(g.std_errors[i] > 0.0)) throw DomainError("conditional_delta: std_error must be positive");
      if (!(g.weights[i] >= 0.0)) throw DomainError("conditional_delta: weights must be non-negative");
      if (!std::isfinite(g.effects[i])) throw DomainError("conditional_delta: effect not finite");
    }
    total += m;
  }
  const auto n = static_cast<double>(total);

  CompensatedSum gain_sum;
  CompensatedSum iid_var;
  std::map<std::string, CompensatedSum> by_site;
  for (const auto& g : groups) {
    CompensatedSum wsum;
    CompensatedSum wb;
    for (std::size_t i = 0; i < g.effects.size(); ++i) {
      wsum.add(g.weights[i]);
      wb.add(g.weights[i] * g.effects[i]);
    }
    const double w_total = wsum.value();
    if (!(w_total > 0.0)) throw DomainError("conditional_delta: group weights are all zero");
    const double b_bar = wb.value() / w_total;

    // d delta / d b_bar for this group
    CompensatedSum slope;
    for (std::size_t i = 0; i < g.effects.size(); ++i) {
      const double s = g.std_errors[i];
      const double x = b_bar / s;
      gain_sum.add(basis::conditional_power(c * x, cv) - basis::conditional_power(x, cv));
      slope.add((c * basis::conditional_power_derivative(c * x, cv) -
                 basis::conditional_power_derivative(x, cv)) /
                s);
    }
    const double group_slope = slope.value() / n;
    for (std::size_t i = 0; i < g.effects.size(); ++i) {
      // contribution of member i's estimation error: d delta / d b_i times s_i
      const double li = group_slope * g.weights[i] / w_total * g.std_errors[i];
      iid_var.add(li * li);
      // same-site members perfectly correlated in whichever direction inflates the variance
      if (se_mode == ConditionalSe::WorstCase) by_site[g.sites[i]].add(std::abs(li));
    }
  }

  ConditionalResult out;
  out.members = total;
  out.delta = gain_sum.value() / n;
  if (se_mode == ConditionalSe::Independent) {
    out.std_error = std::sqrt(iid_var.value());
  } else {
    CompensatedSum var;
    for (const auto& [site, acc] : by_site) var.add(acc.value() * acc.value());
    out.std_error = std::sqrt(var.value());
  }
  return out;
}

}  // namespace powergain
