#pragma once

#include <cstddef>
#include <vector>

namespace powergain::quadrature {

/// Nodes and weights of an n-point Gauss rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }

  /// Sum of weight * f(node).
  template <class F>
  double apply(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Gauss–Legendre rule on [-1, 1]; exact for polynomials of degree <= 2n - 1.
GaussRule gauss_legendre(std::size_t n);

/// Gauss–Hermite rule for the standard normal density: sum w_i f(x_i) ~ E[f(Z)].
/// Weights sum to one.
GaussRule gauss_hermite_normal(std::size_t n);

/// Cached Gauss–Legendre rule; safe for concurrent use. n must be in [1, 128].
const GaussRule& cached_gauss_legendre(std::size_t n);

/// Integral of f over [a, b] with an n-point Gauss–Legendre rule.
template <class F>
double integrate_legendre(F&& f, double a, double b, std::size_t n) {
  const GaussRule& rule = cached_gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * acc;
}

}  // namespace powergain::quadrature
