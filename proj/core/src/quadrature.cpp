#include "powergain/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "powergain/errors.hpp"

namespace powergain::quadrature {
namespace {

constexpr std::size_t kMaxCachedNodes = 128;

// Golub–Welsch: eigenvalues of the symmetric Jacobi matrix are the nodes,
// squared first eigenvector components (times the total mass) the weights.
GaussRule golub_welsch(std::size_t n, double mass, auto off_diagonal) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double b = off_diagonal(k);
    const auto i = static_cast<Eigen::Index>(k);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    rule.nodes[i] = solver.eigenvalues()(col);
    const double v0 = solver.eigenvectors()(0, col);
    rule.weights[i] = mass * v0 * v0;
  }
  return rule;
}

void symmetrize(GaussRule& rule) {
  const std::size_t n = rule.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
}

}  // namespace

GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: need at least one node");
  GaussRule rule = golub_welsch(n, 2.0, [](std::size_t k) {
    const double kk = static_cast<double>(k);
    return kk / std::sqrt(4.0 * kk * kk - 1.0);
  });
  symmetrize(rule);
  return rule;
}

GaussRule gauss_hermite_normal(std::size_t n) {
  if (n == 0) throw DomainError("gauss_hermite_normal: need at least one node");
  GaussRule rule = golub_welsch(n, 1.0, [](std::size_t k) { return std::sqrt(static_cast<double>(k)); });
  symmetrize(rule);
  // Christoffel weights 1 / sum_k He_k(x)^2 are accurate to full relative
  // precision even in the tails, unlike the squared eigenvector entries.
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rule.nodes[i];
    double prev = 1.0;
    double cur = x;
    double norm2 = 1.0 + (n > 1 ? x * x : 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                          std::sqrt(static_cast<double>(k + 1));
      prev = cur;
      cur = next;
      norm2 += cur * cur;
    }
    rule.weights[i] = 1.0 / norm2;
  }
  return rule;
}

const GaussRule& cached_gauss_legendre(std::size_t n) {
  static const std::array<GaussRule, kMaxCachedNodes> rules = [] {
    std::array<GaussRule, kMaxCachedNodes> out;
    for (std::size_t k = 0; k < kMaxCachedNodes; ++k) out[k] = gauss_legendre(k + 1);
    return out;
  }();
  if (n == 0 || n > kMaxCachedNodes) {
    throw DomainError("cached_gauss_legendre: node count must be in [1, 128]");
  }
  return rules[n - 1];
}

}  // namespace powergain::quadrature
