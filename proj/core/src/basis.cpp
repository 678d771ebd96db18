#include "powergain/basis.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "powergain/errors.hpp"
#include "powergain/quadrature.hpp"

namespace powergain::basis {
namespace {

void check_degree(int j) {
  if (j < 0 || j > kMaxDegree) {
    throw DomainError("hermite degree " + std::to_string(j) + " outside [0, " +
                      std::to_string(kMaxDegree) + "]");
  }
}

}  // namespace

double hermite(int j, double x) {
  check_degree(j);
  if (j == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < j; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_series(double x, double weight, std::span<double> out) {
  if (out.empty()) return;
  check_degree(static_cast<int>(out.size()) - 1);
  if (weight == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  out[0] = weight;
  if (out.size() == 1) return;
  out[1] = x * weight;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    out[k + 1] = (x * out[k] - std::sqrt(static_cast<double>(k)) * out[k - 1]) /
                 std::sqrt(static_cast<double>(k + 1));
  }
}

double gaussian_pdf(double x, double variance) {
  if (!(variance > 0.0)) throw DomainError("gaussian_pdf: variance must be positive");
  return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double conditional_power(double h, double cv) {
  if (!(cv > 0.0)) throw DomainError("conditional_power: critical value must be positive");
  const double a = std::abs(h);
  // upper rejection tail + lower rejection tail
  return normal_cdf(a - cv) + normal_cdf(-cv - a);
}

double conditional_power_derivative(double h, double cv) {
  if (!(cv > 0.0)) throw DomainError("conditional_power: critical value must be positive");
  return gaussian_pdf(h - cv, 1.0) - gaussian_pdf(h + cv, 1.0);
}

void ScaledBasisFamily::validate() const {
  if (!(sigma_t2 > 0.0)) throw DomainError("sigma_T^2 must be positive");
  if (!(c >= 1.0)) throw DomainError("scale factor c must be >= 1");
}

double ScaledBasisFamily::weight_variance(Family family) const {
  switch (family) {
    case Family::Psi:
      return sigma_t2;
    case Family::Phi:
      return 1.0 + sigma_t2 - 1.0 / (c * c);
    case Family::Chi:
      return 1.0 + sigma_t2;
  }
  return sigma_t2;
}

double ScaledBasisFamily::scale(Family family) const { return std::sqrt(weight_variance(family)); }

double ScaledBasisFamily::evaluate(Family family, int j, double x) const {
  return hermite(j, x / scale(family));
}

double integrate_basis(int j, Family family, double half_width, const ScaledBasisFamily& params) {
  check_degree(j);
  params.validate();
  if (!(half_width > 0.0)) throw DomainError("integrate_basis: half_width must be positive");
  if (j % 2 == 1) return 0.0;
  const double s = params.scale(family);
  const auto nodes = static_cast<std::size_t>(j / 2 + 1);
  return quadrature::integrate_legendre([&](double t) { return hermite(j, t / s); }, -half_width,
                                        half_width, nodes);
}

}  // namespace powergain::basis
