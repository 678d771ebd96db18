#include "powergain/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "powergain/basis.hpp"
#include "powergain/errors.hpp"

namespace powergain {

void TuningConfig::validate() const {
  if (!(c >= 1.0) || !std::isfinite(c)) throw DomainError("c must be a finite value >= 1");
  if (!(cv > 0.0)) throw DomainError("critical value must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(sigma_t2 > 0.0)) throw DomainError("sigma_T^2 must be positive");
  if (!(const_c > 0.0)) throw DomainError("constant C must be positive");
  if (!(const_d > 0.0)) throw DomainError("constant D must be positive");
}

SingularValues singular_values(int j, const TuningConfig& cfg) {
  cfg.validate();
  if (j < 0) throw DomainError("singular_values: negative index");
  const double s = cfg.sigma_t2;
  const double inv_c2 = 1.0 / (cfg.c * cfg.c);
  const double half_j = 0.5 * static_cast<double>(j);
  return {std::pow((1.0 + s - inv_c2) / (1.0 + s), half_j), std::pow(s / (s + 1.0 - inv_c2), half_j)};
}

double a_coefficient(int j, const TuningConfig& cfg) {
  cfg.validate();
  if (cfg.c == 1.0 || j % 2 == 1) return 0.0;
  const basis::ScaledBasisFamily family{cfg.sigma_t2, cfg.c};
  const double lambda = singular_values(j, cfg).lambda;
  const double factual = basis::integrate_basis(j, basis::Family::Psi, cfg.cv, family);
  const double counterfactual = basis::integrate_basis(j, basis::Family::Phi, cfg.cv / cfg.c, family);
  return factual - counterfactual / lambda;
}

Tuning select_tuning(const TuningConfig& cfg) {
  cfg.validate();
  if (cfg.n_effective < 2) throw DomainError("select_tuning: n_effective must be at least 2");
  const double cube_root = std::cbrt(static_cast<double>(cfg.n_effective));
  const double epsilon = cfg.const_c / cube_root;
  const double ratio = std::log(cfg.const_d / cube_root) /
                       std::log(std::sqrt(cfg.sigma_t2 / (1.0 + cfg.sigma_t2)));
  const double J = std::clamp(std::floor(ratio), 0.0, static_cast<double>(basis::kMaxDegree));
  return {static_cast<int>(J), epsilon};
}

SpectralBasis::SpectralBasis(const TuningConfig& cfg, int J)
    : J_(J), c_(cfg.c), cv_(cfg.cv), sigma_t2_(cfg.sigma_t2) {
  cfg.validate();
  if (J < 0 || J > basis::kMaxDegree) throw DomainError("SpectralBasis: J outside [0, 64]");
  const auto size = static_cast<std::size_t>(J) + 1;
  eta_.resize(size);
  lambda_.resize(size);
  a_.resize(size);
  for (int j = 0; j <= J; ++j) {
    const auto sv = singular_values(j, cfg);
    eta_[static_cast<std::size_t>(j)] = sv.eta;
    lambda_[static_cast<std::size_t>(j)] = sv.lambda;
    a_[static_cast<std::size_t>(j)] = a_coefficient(j, cfg);
  }
}

void SpectralBasis::weighted_psi(double t, std::span<double> out) const {
  const double sigma = std::sqrt(sigma_t2_);
  basis::hermite_series(t / sigma, basis::gaussian_pdf(t, sigma_t2_), out.first(a_.size()));
}

double SpectralBasis::kernel(double t) const {
  if (trivial()) return 0.0;
  double buf[basis::kMaxDegree + 1];
  std::span<double> h(buf, a_.size());
  weighted_psi(t, h);
  double acc = 0.0;
  // odd a_j vanish; skipping them keeps S exactly even in t
  for (std::size_t j = 0; j < a_.size(); j += 2) acc += a_[j] * h[j];
  return acc;
}

}  // namespace powergain
