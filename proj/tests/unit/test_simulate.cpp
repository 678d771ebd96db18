#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "powergain/errors.hpp"
#include "powergain/simulate.hpp"

using namespace powergain;
using namespace powergain::sim;

TEST(Dgp, ParseNames) {
  EXPECT_EQ(parse_prior("Bimodal"), Prior::Bimodal);
  EXPECT_EQ(parse_prior("true-null"), Prior::TrueNull);
  EXPECT_EQ(parse_noise("t30"), Noise::StudentT);
  EXPECT_EQ(parse_noise("lognormal"), Noise::LognormalMean);
  try {
    parse_prior("gamma");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("bimodal"), std::string::npos);
  }
  EXPECT_THROW(parse_noise("laplace"), DomainError);
}

TEST(Dgp, Validation) {
  DgpSpec s;
  s.theta0 = 0.0;
  EXPECT_THROW(s.validate(), DomainError);
  s = DgpSpec{};
  s.prior = Prior::Fitted;
  s.fitted_masses = {0.5, 0.4};
  EXPECT_THROW(s.validate(), DomainError);
  s.fitted_masses = kFittedMasses;
  EXPECT_NO_THROW(s.validate());
}

TEST(Draw, SizeAndStatusQuoUnderNull) {
  DgpSpec s;
  s.prior = Prior::TrueNull;
  s.theta0 = 1.0;
  const auto sample = draw_population(s, 200000, 1);
  EXPECT_EQ(sample.size(), 200000u);
  EXPECT_FALSE(sample.has_study_ids());
  std::size_t sig = 0;
  for (double t : sample.t) sig += std::abs(t) > 1.96;
  EXPECT_NEAR(static_cast<double>(sig) / 200000.0, 0.05, 0.002);
}

TEST(Draw, ThinningRaisesSignificantShare) {
  DgpSpec s;
  s.prior = Prior::TrueNull;
  s.theta0 = 0.9;
  const auto sample = draw_population(s, 400000, 2);
  std::size_t sig = 0;
  for (double t : sample.t) sig += std::abs(t) >= 1.96;
  const double want = 0.05 / (0.05 + 0.9 * 0.95);
  EXPECT_NEAR(want, 0.0552, 1e-4);
  EXPECT_NEAR(static_cast<double>(sig) / 400000.0, want, 0.0015);
}

TEST(Draw, RetainedFractionOfInsignificantIsTheta) {
  DgpSpec s;
  s.prior = Prior::Uniform;
  s.theta0 = 0.7;
  Rng rng = make_stream(9, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t insig = 0;
  std::size_t kept = 0;
  for (int i = 0; i < 200000; ++i) {
    const double t = draw_effect(s, rng) + draw_noise(s, rng);
    const double u = unit(rng);
    if (std::abs(t) < s.cv) {
      ++insig;
      kept += u < s.theta0;
    }
  }
  const double frac = static_cast<double>(kept) / static_cast<double>(insig);
  EXPECT_NEAR(frac, 0.7, 4.0 * std::sqrt(0.21 / static_cast<double>(insig)));
}

TEST(Draw, LognormalNoiseIsStandardized) {
  DgpSpec s;
  s.noise = Noise::LognormalMean;
  Rng rng = make_stream(4, 0);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double z = draw_noise(s, rng);
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.03);
}

TEST(Draw, Deterministic) {
  DgpSpec s;
  EXPECT_EQ(draw_population(s, 100, 42).t, draw_population(s, 100, 42).t);
  EXPECT_NE(draw_population(s, 100, 42).t, draw_population(s, 100, 43).t);
}

TEST(Oracle, NullPower) {
  DgpSpec s;
  s.prior = Prior::TrueNull;
  for (double scale : {1.0, std::numbers::sqrt2, 3.0}) {
    EXPECT_NEAR(oracle_power(s, scale), 2.0 * oracle::ncdf(-1.96), 1e-6);
  }
}

TEST(Oracle, QuadratureAgainstClosedForm) {
  DgpSpec s;
  for (double scale : {1.0, std::numbers::sqrt2, 2.0}) {
    s.prior = Prior::Large;
    EXPECT_NEAR(quadrature_power(s, scale), oracle::normal_prior_power(1.96, 0.2, scale, 1.96), 1e-9);
    s.prior = Prior::Slope;
    EXPECT_NEAR(quadrature_power(s, scale), oracle::normal_prior_power(0.96, 0.2, scale, 1.96), 1e-9);
    s.prior = Prior::Bimodal;
    EXPECT_NEAR(quadrature_power(s, scale),
                0.5 * oracle::normal_prior_power(0.0, 1.0, scale, 1.96) +
                    0.5 * oracle::normal_prior_power(2.8, 1.0, scale, 1.96),
                1e-9);
  }
}

TEST(Oracle, PublishedTruths) {
  struct Row {
    Prior p;
    double power;
    double delta;
  };
  for (const Row& r : {Row{Prior::TrueNull, 0.05, 0.00}, Row{Prior::Cauchy, 0.37, 0.09}, Row{Prior::Bimodal, 0.44, 0.12},
                       Row{Prior::Large, 0.50, 0.28}, Row{Prior::Slope, 0.17, 0.12}, Row{Prior::Uniform, 0.37, 0.16},
                       Row{Prior::Fitted, 0.54, 0.10}}) {
    DgpSpec s;
    s.prior = r.p;
    const OracleTruth truth = oracle_truth(s);
    EXPECT_NEAR(truth.power, r.power, 0.005 + 1e-9) << prior_name(r.p);
    // published truths are rounded to two decimals and Monte Carlo based
    EXPECT_NEAR(truth.delta, r.delta, 0.0075) << prior_name(r.p);
  }
}

TEST(Oracle, MonteCarloAgreesWithQuadrature) {
  for (Prior p : all_priors()) {
    DgpSpec s;
    s.prior = p;
    const MonteCarloOracle mc = monte_carlo_oracle(s, std::numbers::sqrt2, 400000, 77);
    const double q = quadrature_power(s, std::numbers::sqrt2) - quadrature_power(s, 1.0);
    EXPECT_NEAR(mc.delta, q, 3.0 * mc.delta_std_error + 1e-12) << prior_name(p);
    const double se_power = std::sqrt(mc.power * (1 - mc.power) / 400000.0);
    EXPECT_NEAR(mc.power, quadrature_power(s, 1.0), 4.0 * se_power + 1e-12) << prior_name(p);
  }
}

TEST(Oracle, TrueCurveMonotone) {
  DgpSpec s;
  s.prior = Prior::Bimodal;
  double prev = -1.0;
  for (double c : {1.0, 1.2, std::numbers::sqrt2, 2.0}) {
    const double d = quadrature_power(s, c) - quadrature_power(s, 1.0);
    EXPECT_GE(d, prev);
    prev = d;
  }
}

TEST(Coverage, ReproducibleAcrossThreadCounts) {
  DgpSpec s;
  s.prior = Prior::Fitted;
  const OracleTruth truth = oracle_truth(s);
  const CoverageRow a = run_coverage(s, 200, 60, TuningConfig{}, 99, truth, CoverageOptions{1});
  const CoverageRow b = run_coverage(s, 200, 60, TuningConfig{}, 99, truth, CoverageOptions{3});
  EXPECT_EQ(a.mean_delta, b.mean_delta);
  EXPECT_EQ(a.sd_delta, b.sd_delta);
  EXPECT_EQ(a.mean_se, b.mean_se);
  EXPECT_EQ(a.coverage, b.coverage);
  EXPECT_EQ(a.failures, b.failures);
  EXPECT_EQ(format_row(a), format_row(b));
}

TEST(Coverage, RowShape) {
  DgpSpec s;
  s.prior = Prior::Large;
  const CoverageRow r = run_coverage(s, 100, 1, TuningConfig{}, 5);
  EXPECT_EQ(r.reps, 1u);
  EXPECT_GE(r.coverage, 0.0);
  EXPECT_LE(r.coverage, 1.0);
  EXPECT_EQ(coverage_header(), "n,dgp,unc_power,delta_c,mean_delta,sd_delta,mean_se,coverage,noise,theta0,reps,failures,seed");
  EXPECT_THROW(run_coverage(s, 100, 0, TuningConfig{}, 5), DomainError);
}

TEST(Coverage, FailuresAreCounted) {
  DgpSpec s;
  s.prior = Prior::TrueNull;
  const CoverageRow r = run_coverage(s, 50, 200, TuningConfig{}, 3);
  EXPECT_GT(r.failures, 0u);
  EXPECT_LT(r.failures, 100u);
}

TEST(Coverage, BiasShrinksWithSampleSize) {
  DgpSpec s;
  s.prior = Prior::Bimodal;
  const OracleTruth truth = oracle_truth(s);
  std::vector<double> bias;
  for (std::size_t n : {50u, 500u, 5000u}) {
    const CoverageRow r = run_coverage(s, n, 300, TuningConfig{}, 17, truth);
    bias.push_back(std::abs(r.mean_delta - truth.delta));
  }
  EXPECT_GT(bias[0], bias[2]);
  EXPECT_LT(bias[2], 0.01);
}

TEST(Presets, Tables) {
  EXPECT_EQ(table_preset(1).size(), 14u);
  EXPECT_EQ(table_preset(2).size(), 7u);
  EXPECT_EQ(table_preset(3).front().spec.noise, Noise::LognormalMean);
  EXPECT_THROW(table_preset(4), DomainError);
}
