#include "powergain/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <tuple>

#include "powergain/basis.hpp"
#include "powergain/errors.hpp"
#include "powergain/inference.hpp"
#include "powergain/pubbias.hpp"
#include "powergain/estimator.hpp"
#include "powergain/summation.hpp"

namespace powergain::sim {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  out.erase(std::remove_if(out.begin(), out.end(), [](char ch) { return ch == '-' || ch == '_'; }),
            out.end());
  return out;
}

constexpr std::uint64_t kEffectStream = 1;
constexpr std::uint64_t kNoiseStreamBase = 1u << 20;
constexpr std::size_t kNoiseChunk = 1u << 17;

double kronrod(const auto& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-10);
}

// E power(scale H), H ~ N(mu, tau^2)
double normal_prior_power(double mu, double tau, double scale, double cv) {
  constexpr double kWidth = 12.0;
  auto f = [&](double x) {
    return basis::conditional_power(scale * (mu + tau * x), cv) * basis::gaussian_pdf(x, 1.0);
  };
  return kronrod(f, -kWidth, kWidth);
}

struct NoiseKey {
  Noise noise;
  int df;
  int terms;
  std::size_t draws;
  std::uint64_t seed;
  auto operator<=>(const NoiseKey&) const = default;
};

std::shared_ptr<const std::vector<double>> cached_noise(const DgpSpec& spec, std::size_t draws,
                                                        std::uint64_t seed) {
  static std::mutex mutex;
  static std::map<NoiseKey, std::shared_ptr<const std::vector<double>>> cache;
  const NoiseKey key{spec.noise, spec.noise == Noise::StudentT ? spec.student_df : 0,
                     spec.noise == Noise::LognormalMean ? spec.lognormal_terms : 0, draws, seed};
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto sample = std::make_shared<std::vector<double>>(draws);
  const std::size_t chunks = (draws + kNoiseChunk - 1) / kNoiseChunk;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < chunks; k = next++) {
      Rng rng = make_stream(seed, kNoiseStreamBase + k);
      const std::size_t end = std::min(draws, (k + 1) * kNoiseChunk);
      for (std::size_t i = k * kNoiseChunk; i < end; ++i) (*sample)[i] = draw_noise(spec, rng);
    }
  };
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  cache.emplace(key, sample);
  return sample;
}

struct RepResult {
  bool ok = false;
  double delta = 0.0;
  double se = 0.0;
  bool covered = false;
};

}  // namespace

Prior parse_prior(std::string_view name) {
  const std::string key = lower(name);
  for (Prior p : all_priors()) {
    if (key == prior_name(p)) return p;
  }
  throw DomainError("unknown DGP '" + std::string(name) +
                    "'; valid: truenull, cauchy, bimodal, large, slope, uniform, fitted");
}

Noise parse_noise(std::string_view name) {
  const std::string key = lower(name);
  if (key == "normal" || key == "gaussian") return Noise::Normal;
  if (key == "t" || key == "t30" || key == "studentt" || key == "student") return Noise::StudentT;
  if (key == "lognormal" || key == "lognormalmean") return Noise::LognormalMean;
  throw DomainError("unknown noise '" + std::string(name) + "'; valid: normal, t30, lognormal");
}

std::string_view prior_name(Prior p) {
  switch (p) {
    case Prior::TrueNull: return "truenull";
    case Prior::Cauchy: return "cauchy";
    case Prior::Bimodal: return "bimodal";
    case Prior::Large: return "large";
    case Prior::Slope: return "slope";
    case Prior::Uniform: return "uniform";
    case Prior::Fitted: return "fitted";
  }
  return "unknown";
}

std::string_view noise_name(Noise n) {
  switch (n) {
    case Noise::Normal: return "normal";
    case Noise::StudentT: return "t30";
    case Noise::LognormalMean: return "lognormal";
  }
  return "unknown";
}

const std::vector<Prior>& all_priors() {
  static const std::vector<Prior> priors{Prior::TrueNull, Prior::Cauchy, Prior::Bimodal, Prior::Large,
                                         Prior::Slope,    Prior::Uniform, Prior::Fitted};
  return priors;
}

void DgpSpec::validate() const {
  if (!(theta0 > 0.0 && theta0 <= 1.0)) throw DomainError("DgpSpec: theta0 must lie in (0, 1]");
  if (!(cv > 0.0) || !std::isfinite(cv)) throw DomainError("DgpSpec: cv must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("DgpSpec: c must be positive");
  if (student_df < 1) throw DomainError("DgpSpec: student_df must be >= 1");
  if (lognormal_terms < 1) throw DomainError("DgpSpec: lognormal_terms must be >= 1");
  if (prior == Prior::Fitted) {
    if (fitted_masses.empty()) throw DomainError("DgpSpec: fitted masses empty");
    CompensatedSum total;
    for (double m : fitted_masses) {
      if (!(m >= 0.0)) throw DomainError("DgpSpec: fitted masses must be non-negative");
      total.add(m);
    }
    if (std::abs(total.value() - 1.0) > 1e-9) throw DomainError("DgpSpec: fitted masses must sum to 1");
  }
}

std::string DgpSpec::label() const {
  return std::string(prior_name(prior)) + "/" + std::string(noise_name(noise));
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double draw_effect(const DgpSpec& spec, Rng& rng) {
  switch (spec.prior) {
    case Prior::TrueNull: return 0.0;
    case Prior::Cauchy: return std::cauchy_distribution<double>(0.0, 1.0)(rng);
    case Prior::Bimodal: {
      const bool upper = std::bernoulli_distribution(0.5)(rng);
      return std::normal_distribution<double>(upper ? 2.8 : 0.0, 1.0)(rng);
    }
    case Prior::Large: return std::normal_distribution<double>(1.96, 0.2)(rng);
    case Prior::Slope: return std::normal_distribution<double>(0.96, 0.2)(rng);
    case Prior::Uniform: return std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    case Prior::Fitted: {
      std::discrete_distribution<int> d(spec.fitted_masses.begin(), spec.fitted_masses.end());
      return static_cast<double>(d(rng));
    }
  }
  return 0.0;
}

double draw_noise(const DgpSpec& spec, Rng& rng) {
  switch (spec.noise) {
    case Noise::Normal: return std::normal_distribution<double>(0.0, 1.0)(rng);
    case Noise::StudentT: return std::student_t_distribution<double>(spec.student_df)(rng);
    case Noise::LognormalMean: {
      std::lognormal_distribution<double> d(0.0, 1.0);
      const int m = spec.lognormal_terms;
      CompensatedSum sum;
      for (int k = 0; k < m; ++k) sum.add(d(rng));
      const double e = std::numbers::e;
      const double mean = sum.value() / m;
      return (mean - std::sqrt(e)) / std::sqrt((e - 1.0) * e / m);
    }
  }
  return 0.0;
}

TScoreSample draw_population(const DgpSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (n < 1) throw DomainError("draw_population: n must be >= 1");
  TScoreSample sample;
  sample.t.reserve(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (sample.t.size() < n) {
    const double t = draw_effect(spec, rng) + draw_noise(spec, rng);
    const double u = unit(rng);
    if (std::abs(t) >= spec.cv || u < spec.theta0) sample.t.push_back(t);
  }
  return sample;
}

TScoreSample draw_population(const DgpSpec& spec, std::size_t n, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  return draw_population(spec, n, rng);
}

double quadrature_power(const DgpSpec& spec, double scale) {
  spec.validate();
  const double cv = spec.cv;
  switch (spec.prior) {
    case Prior::TrueNull: return basis::conditional_power(0.0, cv);
    case Prior::Cauchy: {
      const double half_pi = 0.5 * std::numbers::pi;
      auto f = [&](double u) { return basis::conditional_power(scale * std::tan(u), cv); };
      return kronrod(f, -half_pi, half_pi) / std::numbers::pi;
    }
    case Prior::Bimodal:
      return 0.5 * normal_prior_power(0.0, 1.0, scale, cv) + 0.5 * normal_prior_power(2.8, 1.0, scale, cv);
    case Prior::Large: return normal_prior_power(1.96, 0.2, scale, cv);
    case Prior::Slope: return normal_prior_power(0.96, 0.2, scale, cv);
    case Prior::Uniform: {
      auto f = [&](double h) { return basis::conditional_power(scale * h, cv); };
      return kronrod(f, -3.0, 3.0) / 6.0;
    }
    case Prior::Fitted: {
      CompensatedSum sum;
      for (std::size_t k = 0; k < spec.fitted_masses.size(); ++k) {
        sum.add(spec.fitted_masses[k] * basis::conditional_power(scale * static_cast<double>(k), cv));
      }
      return sum.value();
    }
  }
  return 0.0;
}

MonteCarloOracle monte_carlo_oracle(const DgpSpec& spec, double scale, std::size_t draws,
                                    std::uint64_t seed) {
  spec.validate();
  if (draws < 2) throw DomainError("monte_carlo_oracle: need at least 2 draws");
  const auto noise = cached_noise(spec, draws, seed);
  Rng rng = make_stream(seed, kEffectStream);
  std::size_t hits = 0;
  std::size_t hits_scaled = 0;
  // d_i = 1{scaled} - 1{factual} takes values in {-1, 0, 1}
  std::size_t up = 0;
  std::size_t down = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double h = draw_effect(spec, rng);
    const double z = (*noise)[i];
    const bool f = std::abs(h + z) > spec.cv;
    const bool s = std::abs(scale * h + z) > spec.cv;
    hits += f;
    hits_scaled += s;
    up += s && !f;
    down += f && !s;
  }
  const auto nd = static_cast<double>(draws);
  MonteCarloOracle out;
  out.draws = draws;
  out.power = static_cast<double>(hits) / nd;
  out.power_scaled = static_cast<double>(hits_scaled) / nd;
  out.delta = (static_cast<double>(up) - static_cast<double>(down)) / nd;
  const double second = static_cast<double>(up + down) / nd;
  out.delta_std_error = std::sqrt(std::max(0.0, second - out.delta * out.delta) / (nd - 1.0));
  return out;
}

double oracle_power(const DgpSpec& spec, double scale) {
  if (spec.noise == Noise::Normal) return quadrature_power(spec, scale);
  const MonteCarloOracle mc = monte_carlo_oracle(spec, scale, kOracleDraws, kOracleSeed);
  return mc.power_scaled;
}

OracleTruth oracle_truth(const DgpSpec& spec) {
  spec.validate();
  static std::mutex mutex;
  static std::map<std::tuple<Prior, Noise, int, int, double, double, std::vector<double>>, OracleTruth> cache;
  const auto key = std::make_tuple(spec.prior, spec.noise, spec.student_df, spec.lognormal_terms,
                                   spec.cv, spec.c, spec.fitted_masses);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  OracleTruth truth;
  if (spec.noise == Noise::Normal) {
    truth.power = quadrature_power(spec, 1.0);
    truth.delta = quadrature_power(spec, spec.c) - truth.power;
  } else {
    const MonteCarloOracle mc = monte_carlo_oracle(spec, spec.c, kOracleDraws, kOracleSeed);
    truth.power = mc.power;
    truth.delta = mc.delta;
  }
  std::lock_guard lock(mutex);
  cache.emplace(key, truth);
  return truth;
}

CoverageRow run_coverage(const DgpSpec& spec, std::size_t n, std::size_t reps,
                         const TuningConfig& cfg, std::uint64_t seed, const CoverageOptions& options) {
  return run_coverage(spec, n, reps, cfg, seed, oracle_truth(spec), options);
}

CoverageRow run_coverage(const DgpSpec& spec, std::size_t n, std::size_t reps,
                         const TuningConfig& cfg, std::uint64_t seed, const OracleTruth& truth,
                         const CoverageOptions& options) {
  spec.validate();
  if (reps < 1) throw DomainError("run_coverage: reps must be >= 1");
  if (n < 2) throw DomainError("run_coverage: n must be >= 2");
  TuningConfig run_cfg = cfg;
  run_cfg.c = spec.c;
  run_cfg.cv = spec.cv;
  run_cfg.n_effective = n;
  run_cfg.validate();
  const Tuning tuning = select_tuning(run_cfg);
  const SpectralBasis basis(run_cfg, tuning.J);
  const ClusterMap clusters = ClusterMap::singletons(n);

  std::vector<RepResult> results(reps);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      Rng rng = make_stream(seed, r);
      const TScoreSample sample = draw_population(spec, n, rng);
      const auto t = sample.scores();
      RepResult& out = results[r];
      try {
        const ThetaEstimate th = estimate_theta(t, tuning.epsilon, run_cfg.cv);
        if (th.lower_bin_empty()) continue;
        out.delta = delta_hat_weighted(t, basis, th.theta, th.cutoff);
        const double v = variance_hat(t, clusters, make_ingredients(t, th, basis), basis);
        out.se = std::sqrt(v);
        const Interval ci = confidence_interval(out.delta, v, run_cfg.alpha);
        out.covered = ci.low <= truth.delta && truth.delta <= ci.high;
        out.ok = true;
      } catch (const EstimationError&) {
        out.ok = false;
      }
    }
  };
  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work);
    work();
  }

  CoverageRow row;
  row.n = n;
  row.dgp = std::string(prior_name(spec.prior));
  row.noise = std::string(noise_name(spec.noise));
  row.theta0 = spec.theta0;
  row.true_power = truth.power;
  row.true_delta = truth.delta;
  row.reps = reps;
  row.seed = seed;
  CompensatedSum sum_delta;
  CompensatedSum sum_se;
  std::size_t ok = 0;
  std::size_t covered = 0;
  for (const RepResult& r : results) {
    if (!r.ok) continue;
    ++ok;
    covered += r.covered;
    sum_delta.add(r.delta);
    sum_se.add(r.se);
  }
  row.failures = reps - ok;
  if (ok == 0) {
    row.mean_delta = row.sd_delta = row.mean_se = row.coverage = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  const auto k = static_cast<double>(ok);
  row.mean_delta = sum_delta.value() / k;
  row.mean_se = sum_se.value() / k;
  row.coverage = static_cast<double>(covered) / k;
  CompensatedSum ss;
  for (const RepResult& r : results) {
    if (r.ok) ss.add((r.delta - row.mean_delta) * (r.delta - row.mean_delta));
  }
  row.sd_delta = ok > 1 ? std::sqrt(ss.value() / (k - 1.0)) : 0.0;
  return row;
}

std::vector<PresetRow> table_preset(int table) {
  std::vector<std::size_t> sizes;
  Noise noise = Noise::Normal;
  switch (table) {
    case 1: sizes = {50, 500}; break;
    case 2: sizes = {500}; noise = Noise::StudentT; break;
    case 3: sizes = {500}; noise = Noise::LognormalMean; break;
    default: throw DomainError("unknown table preset " + std::to_string(table) + "; valid: 1, 2, 3");
  }
  std::vector<PresetRow> rows;
  for (std::size_t n : sizes) {
    for (Prior p : all_priors()) {
      PresetRow row;
      row.spec.prior = p;
      row.spec.noise = noise;
      row.n = n;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string coverage_header(char delim) {
  const char* cols[] = {"n",        "dgp",      "unc_power", "delta_c", "mean_delta", "sd_delta", "mean_se",
                        "coverage", "noise",    "theta0",    "reps",    "failures",   "seed"};
  std::string out;
  for (const char* c : cols) {
    if (!out.empty()) out += delim;
    out += c;
  }
  return out;
}

std::string format_row(const CoverageRow& row, char delim) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << row.n << delim << row.dgp << delim << row.true_power << delim << row.true_delta << delim
     << row.mean_delta << delim << row.sd_delta << delim << row.mean_se << delim << row.coverage
     << delim << row.noise << delim << row.theta0 << delim << row.reps << delim << row.failures
     << delim << row.seed;
  return os.str();
}

}  // namespace powergain::sim
