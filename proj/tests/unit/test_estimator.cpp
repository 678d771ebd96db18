#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "powergain/errors.hpp"
#include "powergain/estimator.hpp"
#include "powergain/pipeline.hpp"
#include "powergain/simulate.hpp"

using namespace powergain;

namespace {

TuningConfig config(double c = std::numbers::sqrt2) {
  TuningConfig cfg;
  cfg.c = c;
  cfg.n_effective = 500;
  return cfg;
}

std::vector<double> bimodal(std::size_t n, std::uint64_t seed, double theta0 = 0.9) {
  sim::DgpSpec spec;
  spec.prior = sim::Prior::Bimodal;
  spec.theta0 = theta0;
  return sim::draw_population(spec, n, seed).t;
}

}  // namespace

TEST(StatusQuo, Examples) {
  EXPECT_EQ(status_quo_power(std::vector<double>{0.5, 2.5}, 1.96), 0.5);
  EXPECT_EQ(status_quo_power(std::vector<double>{0.5, -1.0, 1.95}, 1.96), 0.0);
  EXPECT_EQ(status_quo_power(std::vector<double>{1.96}, 1.96), 0.0);
  EXPECT_THROW(status_quo_power(std::vector<double>{}, 1.96), DomainError);
}

TEST(DeltaHat, ZeroAtUnitScale) {
  const auto t = bimodal(300, 1);
  const SpectralBasis b(config(1.0), 14);
  EXPECT_EQ(delta_hat(t, b), 0.0);
  EXPECT_EQ(delta_hat_weighted(t, b, 0.7, 1.96), 0.0);
}

TEST(DeltaHat, EqualsMeanKernel) {
  const auto t = bimodal(300, 2);
  const SpectralBasis b(config(), 14);
  double acc = 0.0;
  for (double v : t) acc += oracle::kernel(v, 14, std::numbers::sqrt2, 1.96, 1.0);
  EXPECT_NEAR(delta_hat(t, b), acc / static_cast<double>(t.size()), 1e-10);
}

TEST(DeltaHat, SignInvariance) {
  const auto t = bimodal(400, 3);
  std::vector<double> flipped = t;
  std::vector<double> absolute = t;
  for (double& v : flipped) v = -v;
  for (double& v : absolute) v = std::abs(v);
  const SpectralBasis b(config(), 14);
  EXPECT_EQ(delta_hat(t, b), delta_hat(flipped, b));
  EXPECT_EQ(delta_hat(t, b), delta_hat(absolute, b));
  EXPECT_EQ(delta_hat_pb(t, b, 0.25).delta, delta_hat_pb(flipped, b, 0.25).delta);
  EXPECT_EQ(delta_hat_pb(t, b, 0.25).delta, delta_hat_pb(absolute, b, 0.25).delta);
}

TEST(DeltaHatPb, UnitThetaIsIdenticalToPlainEstimator) {
  std::vector<double> t{0.2, -1.0, 1.93, 1.99, -1.92, 2.01, 3.5, -0.4, 2.9, 5.1};
  const SpectralBasis b(config(), 12);
  const PbEstimate pb = delta_hat_pb(t, b, 0.1);
  ASSERT_EQ(pb.theta.theta, 1.0);
  EXPECT_EQ(pb.delta, delta_hat(t, b));
  EXPECT_EQ(delta_hat_weighted(t, b, 1.0, 1.96), delta_hat(t, b));
}

TEST(DeltaHatPb, WeightingMatchesDefinition) {
  const auto t = bimodal(500, 4);
  const SpectralBasis b(config(), 14);
  const PbEstimate pb = delta_hat_pb(t, b, 0.25);
  const double th = pb.theta.theta;
  double num = 0.0;
  double den = 0.0;
  for (double v : t) {
    const double w = std::abs(v) < 1.96 ? th : 1.0;
    num += oracle::kernel(v, 14, std::numbers::sqrt2, 1.96, 1.0) / w;
    den += 1.0 / w;
  }
  EXPECT_NEAR(pb.delta, num / den, 1e-10);
}

TEST(DeltaHatPb, PropagatesEmptyCaliper) {
  const SpectralBasis b(config(), 10);
  EXPECT_THROW(delta_hat_pb(std::vector<double>{0.1, 0.5, 1.0}, b, 0.1), EstimationError);
}

TEST(Prior, OneTermArithmetic) {
  const SpectralBasis b(config(), 0);
  const PriorReconstruction prior = reconstruct_prior(std::vector<double>{0.0, 0.0, 0.0}, b, 1.0, 1.96);
  ASSERT_EQ(prior.J(), 0);
  EXPECT_NEAR(prior.coefficients()[0], 0.3989422804014327, 1e-15);
}

TEST(Prior, PlugInEquivalence) {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const auto t = bimodal(500, seed);
    const SpectralBasis b(config(), 14);
    const PbEstimate pb = delta_hat_pb(t, b, 0.25);
    const PriorReconstruction prior = reconstruct_prior(t, b, pb.theta.theta, 1.96);
    EXPECT_NEAR(prior.delta_at(std::numbers::sqrt2), pb.delta, 1e-10);
    // coefficients do not depend on c, so one reconstruction serves other scales
    const SpectralBasis b2(config(2.0), 14);
    EXPECT_NEAR(prior.delta_at(2.0), delta_hat_weighted(t, b2, pb.theta.theta, 1.96), 1e-10);
    EXPECT_EQ(prior.delta_at(1.0), 0.0);
  }
}

TEST(Prior, EvenCoefficientsGiveEvenDensity) {
  const auto t = bimodal(500, 8);
  const SpectralBasis b(config(), 14);
  std::vector<double> moments = sample_moments(t, b);
  for (std::size_t j = 1; j < moments.size(); j += 2) moments[j] = 0.0;
  const PriorReconstruction prior(moments, 1.0, 1.96, std::numbers::sqrt2);
  for (double h : {0.3, 1.0, 2.8}) EXPECT_NEAR(prior.density(h), prior.density(-h), 1e-12);
}

TEST(Densities, CoincideAtUnitScale) {
  const auto t = bimodal(500, 9);
  const SpectralBasis b(config(), 14);
  const PriorReconstruction prior = reconstruct_prior(t, b, 1.0, 1.96);
  for (double x : {-2.0, 0.0, 1.5, 3.0}) {
    const DensityPair d = reconstruct_densities(prior, x, 1.0);
    EXPECT_NEAR(d.f_T, d.f_Tc, 1e-12);
  }
}

TEST(Densities, IntegratedDifferenceIsDeltaHat) {
  const auto t = bimodal(500, 10);
  const SpectralBasis b(config(), 14);
  const PbEstimate pb = delta_hat_pb(t, b, 0.25);
  const PriorReconstruction prior = reconstruct_prior(t, b, pb.theta.theta, 1.96);
  auto diff = [&](double x) {
    const DensityPair d = reconstruct_densities(prior, x);
    return d.f_T - d.f_Tc;
  };
  EXPECT_NEAR(oracle::kronrod(diff, -1.96, 1.96), pb.delta, 1e-8);
}

TEST(Densities, PointMassAtZero) {
  sim::DgpSpec spec;
  spec.prior = sim::Prior::TrueNull;
  spec.theta0 = 1.0;
  const auto s = sim::draw_population(spec, 200000, 12);
  const SpectralBasis b(config(), 14);
  const PriorReconstruction prior = reconstruct_prior(s.t, b, 1.0, 1.96);
  EXPECT_NEAR(reconstruct_densities(prior, 0.0).f_T, 0.39894, 0.01);
}

TEST(NaiveControl, RescalingIsNotAnEstimator) {
  sim::DgpSpec spec;
  spec.prior = sim::Prior::TrueNull;
  spec.theta0 = 1.0;
  const auto s = sim::draw_population(spec, 1'000'000, 13);
  TuningConfig cfg = config();
  cfg.n_effective = s.size();
  const SpectralBasis b(cfg, select_tuning(cfg).J);
  EXPECT_NEAR(naive_rescaled_power(s.t, std::numbers::sqrt2, 1.96), 2.0 * oracle::ncdf(-1.96 / std::numbers::sqrt2),
              0.002);
  EXPECT_NEAR(naive_rescaled_power(s.t, std::numbers::sqrt2, 1.96), 0.166, 0.002);
  const EstimateReport r = estimate_power_gain(s, config(), EstimateOptions{false});
  EXPECT_EQ(r.delta_hat, delta_hat(s.t, b));
  EXPECT_LT(std::abs(r.delta_hat), 3.0 * r.std_error) << r.std_error;
  EXPECT_LT(r.std_error, 0.01);
}

TEST(Conditional, Examples) {
  ConditionalGroup zero{{0.0}, {1.0}, {1.0}, {}};
  EXPECT_EQ(conditional_delta(std::span(&zero, 1), std::numbers::sqrt2, 1.96).delta, 0.0);
  ConditionalGroup bench{{2.8016}, {1.0}, {1.0}, {}};
  EXPECT_NEAR(conditional_delta(std::span(&bench, 1), std::numbers::sqrt2, 1.96).delta, 0.178, 1e-3);
}

TEST(Conditional, DeltaMethodMatchesNumericGradient) {
  std::vector<ConditionalGroup> groups{
      {{0.30, 0.10, 0.25, 0.40}, {0.12, 0.20, 0.15, 0.10}, {120, 80, 100, 150}, {"a", "b", "a", "c"}},
      {{0.05, 0.12, -0.02}, {0.09, 0.11, 0.10}, {200, 90, 110}, {"a", "b", "c"}},
  };
  const double c = std::numbers::sqrt2;
  auto delta_of = [&](const std::vector<ConditionalGroup>& gs) {
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto& g : gs) {
      double wb = 0.0;
      double w = 0.0;
      for (std::size_t i = 0; i < g.effects.size(); ++i) {
        wb += g.weights[i] * g.effects[i];
        w += g.weights[i];
      }
      for (double s : g.std_errors) {
        acc += oracle::power(c * wb / w / s, 1.96) - oracle::power(wb / w / s, 1.96);
        ++n;
      }
    }
    return acc / static_cast<double>(n);
  };
  double iid = 0.0;
  std::map<std::string, double> site;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i = 0; i < groups[g].effects.size(); ++i) {
      auto up = groups;
      auto down = groups;
      up[g].effects[i] += 1e-6;
      down[g].effects[i] -= 1e-6;
      const double li = (delta_of(up) - delta_of(down)) / 2e-6 * groups[g].std_errors[i];
      iid += li * li;
      site[groups[g].sites[i]] += std::abs(li);
    }
  }
  double worst = 0.0;
  for (const auto& [k, v] : site) worst += v * v;
  const auto a = conditional_delta(groups, c, 1.96, ConditionalSe::Independent);
  const auto b = conditional_delta(groups, c, 1.96, ConditionalSe::WorstCase);
  EXPECT_NEAR(a.delta, delta_of(groups), 1e-12);
  EXPECT_EQ(a.members, 7u);
  EXPECT_NEAR(a.std_error, std::sqrt(iid), 1e-7);
  EXPECT_NEAR(b.std_error, std::sqrt(worst), 1e-7);
  EXPECT_GE(b.std_error, a.std_error);
}

TEST(Conditional, Validation) {
  ConditionalGroup bad_se{{0.1}, {0.0}, {1.0}, {}};
  EXPECT_THROW(conditional_delta(std::span(&bad_se, 1), 1.5, 1.96), DomainError);
  ConditionalGroup zero_w{{0.1}, {1.0}, {0.0}, {}};
  EXPECT_THROW(conditional_delta(std::span(&zero_w, 1), 1.5, 1.96), DomainError);
  ConditionalGroup no_sites{{0.1}, {1.0}, {1.0}, {}};
  EXPECT_THROW(conditional_delta(std::span(&no_sites, 1), 1.5, 1.96, ConditionalSe::WorstCase), DomainError);
  EXPECT_THROW(conditional_delta(std::span<const ConditionalGroup>{}, 1.5, 1.96), DomainError);
}
