#include "powergain/pipeline.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "powergain/errors.hpp"
#include "powergain/inference.hpp"
#include "powergain/pubbias.hpp"

namespace powergain {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Everything that does not depend on c.
struct Prepared {
  const TScoreSample* sample;
  TuningConfig cfg;
  EstimateOptions options;
  ClusterMap clusters;
  Tuning tuning;
  std::optional<ThetaEstimate> theta;
  std::vector<std::string> diagnostics;
};

Prepared prepare(const TScoreSample& sample, const TuningConfig& cfg, const EstimateOptions& options) {
  sample.validate();
  Prepared p{&sample, cfg, options, {}, {}, std::nullopt, {}};
  if (sample.has_study_ids()) {
    p.clusters = ClusterMap::from_ids(sample.study_id);
  } else {
    p.clusters = ClusterMap::singletons(sample.size());
    p.diagnostics.emplace_back(
        "warning: no study identifiers; every t-score treated as its own cluster (iid assumption)");
  }
  if (options.scale_by == ScaleBy::Studies) {
    if (!sample.has_study_ids()) {
      p.diagnostics.emplace_back(
          "warning: --scale-by studies without study identifiers; tuning uses the t-score count");
    }
    p.cfg.n_effective = p.clusters.count();
  } else {
    p.cfg.n_effective = sample.size();
  }
  p.cfg.validate();
  p.tuning = select_tuning(p.cfg);
  if (options.publication_bias) {
    p.theta = estimate_theta(sample.scores(), p.tuning.epsilon, p.cfg.cv);
    if (p.theta->lower_bin_empty()) {
      p.diagnostics.emplace_back(
          "lower caliper bin empty: theta_hat = 0, standard errors undefined");
    }
  }
  return p;
}

EstimateReport estimate_at(const Prepared& p, double c) {
  TuningConfig cfg = p.cfg;
  cfg.c = c;
  cfg.validate();
  const SpectralBasis basis(cfg, p.tuning.J);
  const auto t = p.sample->scores();

  EstimateReport r;
  r.c = c;
  r.cv = cfg.cv;
  r.alpha = cfg.alpha;
  r.sigma_t2 = cfg.sigma_t2;
  r.const_c = cfg.const_c;
  r.const_d = cfg.const_d;
  r.scale_by = p.options.scale_by == ScaleBy::Studies ? "studies" : "tscores";
  r.J = p.tuning.J;
  r.epsilon = p.tuning.epsilon;
  r.n = t.size();
  r.n_effective = cfg.n_effective;
  r.n_clusters = p.clusters.count();
  r.max_cluster_size = p.clusters.max_block_size();
  r.status_quo_power = status_quo_power(t, cfg.cv);
  r.diagnostics = p.diagnostics;

  InfluenceIngredients ing = ingredients_without_selection(cfg.cv);
  bool se_defined = true;
  if (p.theta) {
    const ThetaEstimate& th = *p.theta;
    r.delta_hat = delta_hat_weighted(t, basis, th.theta, th.cutoff);
    r.theta_hat = th.theta;
    r.B_plus = th.tail.B_plus;
    r.B_minus = th.tail.B_minus;
    ing = make_ingredients(t, th, basis);
    r.Q_hat = ing.Q_hat;
    se_defined = !th.lower_bin_empty();
    if (se_defined) {
      std::vector<double> x(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) {
        x[i] = caliper_influence_X(t[i], th.tail.B_plus, th.tail.B_minus, th.epsilon, th.cutoff);
      }
      r.theta_std_error = th.theta * th.theta * std::sqrt(clustered_variance(x, p.clusters));
    }
  } else {
    r.delta_hat = delta_hat(t, basis);
  }

  if (!se_defined) {
    r.std_error = r.ci_low = r.ci_high = kNaN;
    return r;
  }
  const double v = variance_hat(t, p.clusters, ing, basis);
  r.std_error = std::sqrt(v);
  const Interval ci = confidence_interval(r.delta_hat, v, cfg.alpha);
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  if (p.options.clamp_ci_at_zero) {
    // the true gain has the sign of c - 1
    if (c >= 1.0 && r.ci_low < 0.0) {
      r.ci_low = 0.0;
      r.ci_clamped = true;
    } else if (c < 1.0 && r.ci_high > 0.0) {
      r.ci_high = 0.0;
      r.ci_clamped = true;
    }
    if (r.ci_high < r.ci_low) r.ci_high = r.ci_low;
  }
  return r;
}

}  // namespace

EstimateReport estimate_power_gain(const TScoreSample& sample, const TuningConfig& cfg,
                                   const EstimateOptions& options) {
  return estimate_at(prepare(sample, cfg, options), cfg.c);
}

std::vector<CurvePoint> power_gain_curve(const TScoreSample& sample, const TuningConfig& cfg,
                                         std::span<const double> c2_grid,
                                         const EstimateOptions& options) {
  const Prepared p = prepare(sample, cfg, options);
  std::vector<CurvePoint> out;
  out.reserve(c2_grid.size());
  for (double c2 : c2_grid) {
    if (!(c2 > 0.0) || !std::isfinite(c2)) throw DomainError("curve grid: c^2 must be positive and finite");
    const EstimateReport r = estimate_at(p, std::sqrt(c2));
    out.push_back({c2, r.delta_hat, r.std_error, r.ci_low, r.ci_high});
  }
  return out;
}

}  // namespace powergain
