#include "powergain/pubbias.hpp"

#include <cmath>
#include <sstream>

#include "powergain/errors.hpp"

namespace powergain {

double weight(double t, const CaliperModel& model) {
  if (!(model.theta > 0.0)) throw DomainError("caliper weight: theta must be positive");
  return std::abs(t) < model.cutoff ? model.theta : 1.0;
}

double empirical_cdf_abs(std::span<const double> t, double x) {
  if (t.empty()) throw DomainError("empirical_cdf_abs: empty sample");
  std::size_t count = 0;
  for (double v : t) count += std::abs(v) <= x ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(t.size());
}

EmpiricalTail empirical_tail(std::span<const double> t, double epsilon, double cutoff) {
  if (t.empty()) throw DomainError("caliper: empty sample");
  if (!(epsilon > 0.0)) throw DomainError("caliper: epsilon must be positive");
  EmpiricalTail tail;
  tail.n = t.size();
  std::size_t at_or_below = 0;
  for (double v : t) {
    const double a = std::abs(v);
    if (a <= cutoff) {
      ++at_or_below;
      if (a > cutoff - epsilon) ++tail.count_below;
    } else if (a <= cutoff + epsilon) {
      ++tail.count_above;
    }
  }
  const auto n = static_cast<double>(tail.n);
  tail.F_at_cutoff = static_cast<double>(at_or_below) / n;
  tail.B_plus = static_cast<double>(tail.count_above) / n;
  tail.B_minus = static_cast<double>(tail.count_below) / n;
  return tail;
}

ThetaEstimate estimate_theta(std::span<const double> t, double epsilon, double cutoff) {
  ThetaEstimate est;
  est.epsilon = epsilon;
  est.cutoff = cutoff;
  est.tail = empirical_tail(t, epsilon, cutoff);
  if (est.tail.count_above == 0) {
    std::ostringstream msg;
    msg << "caliper denominator empty: no |t| in (" << cutoff << ", " << cutoff + epsilon
        << "]; widen epsilon (raise the C constant) or supply more scores";
    throw EstimationError(msg.str());
  }
  est.theta = static_cast<double>(est.tail.count_below) / static_cast<double>(est.tail.count_above);
  return est;
}

}  // namespace powergain
