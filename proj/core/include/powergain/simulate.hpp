#pragma once

// Simulation designs, publication-bias thinning, oracles for the true power
// gain, and the Monte Carlo coverage runner.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "powergain/sample.hpp"
#include "powergain/spectrum.hpp"

namespace powergain::sim {

enum class Prior { TrueNull, Cauchy, Bimodal, Large, Slope, Uniform, Fitted };
enum class Noise { Normal, StudentT, LognormalMean };

/// Throws DomainError listing the valid names.
Prior parse_prior(std::string_view name);
Noise parse_noise(std::string_view name);
std::string_view prior_name(Prior p);
std::string_view noise_name(Noise n);
const std::vector<Prior>& all_priors();

/// Point masses on 0..6 for the Fitted prior.
inline const std::vector<double> kFittedMasses{0.02, 0.47, 0.01, 0.27, 0.14, 0.00, 0.09};

struct DgpSpec {
  Prior prior = Prior::Bimodal;
  Noise noise = Noise::Normal;
  double theta0 = 0.9;
  double cv = 1.96;
  double c = std::numbers::sqrt2;
  int student_df = 30;
  int lognormal_terms = 185;
  std::vector<double> fitted_masses = kFittedMasses;

  void validate() const;
  [[nodiscard]] std::string label() const;
};

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream); streams do not depend on thread layout.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

double draw_effect(const DgpSpec& spec, Rng& rng);
/// Noise of the spec's family. t(df) is not rescaled; the lognormal mean is standardized.
double draw_noise(const DgpSpec& spec, Rng& rng);

/// Draws t = h + z and keeps it if |t| >= cv, otherwise with probability theta0,
/// until n scores are retained. No study identifiers (singleton clusters).
TScoreSample draw_population(const DgpSpec& spec, std::size_t n, Rng& rng);
TScoreSample draw_population(const DgpSpec& spec, std::size_t n, std::uint64_t seed);

/// E_H power(scale H) under normal noise, by quadrature (exact sum for
/// discrete priors). Prior only; theta0 plays no role.
double quadrature_power(const DgpSpec& spec, double scale);

struct MonteCarloOracle {
  double power = 0.0;         ///< Pr(|H + Z| > cv)
  double power_scaled = 0.0;  ///< Pr(|scale H + Z| > cv)
  double delta = 0.0;
  double delta_std_error = 0.0;
  std::size_t draws = 0;
};

/// Common random numbers at both scales. The noise sample is cached per
/// (noise law, draws, seed).
MonteCarloOracle monte_carlo_oracle(const DgpSpec& spec, double scale, std::size_t draws,
                                    std::uint64_t seed);

inline constexpr std::size_t kOracleDraws = 10'000'000;
inline constexpr std::uint64_t kOracleSeed = 20240521;

/// Quadrature for normal noise, Monte Carlo (kOracleDraws) otherwise.
double oracle_power(const DgpSpec& spec, double scale);

struct OracleTruth {
  double power = 0.0;  ///< unconditional power before publication bias
  double delta = 0.0;  ///< power gain at spec.c
};

/// Cached per spec.
OracleTruth oracle_truth(const DgpSpec& spec);

struct CoverageRow {
  std::size_t n = 0;
  std::string dgp;
  std::string noise;
  double theta0 = 0.0;
  double true_power = 0.0;
  double true_delta = 0.0;
  double mean_delta = 0.0;
  double sd_delta = 0.0;
  double mean_se = 0.0;
  double coverage = 0.0;
  std::size_t reps = 0;
  std::size_t failures = 0;  ///< replications where theta_hat or its influence was undefined
  std::uint64_t seed = 0;
};

struct CoverageOptions {
  unsigned threads = 1;  ///< 0: hardware concurrency
};

/// cfg supplies alpha, sigma_t2, const_c and const_d; c and cv come from spec.
/// Aggregates run over successful replications, in replication order.
CoverageRow run_coverage(const DgpSpec& spec, std::size_t n, std::size_t reps,
                         const TuningConfig& cfg, std::uint64_t seed,
                         const CoverageOptions& options = {});
CoverageRow run_coverage(const DgpSpec& spec, std::size_t n, std::size_t reps,
                         const TuningConfig& cfg, std::uint64_t seed, const OracleTruth& truth,
                         const CoverageOptions& options = {});

struct PresetRow {
  DgpSpec spec;
  std::size_t n = 0;
};

/// Parameterizations of the three coverage tables: 1 normal noise at n = 50 and
/// 500, 2 t(30) noise, 3 lognormal-mean noise (n = 500).
std::vector<PresetRow> table_preset(int table);

std::string coverage_header(char delim = ',');
std::string format_row(const CoverageRow& row, char delim = ',');

}  // namespace powergain::sim
