#pragma once

#include <stdexcept>

namespace powergain {

/// Argument outside the domain of an operation (bad degree, variance, empty input).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The data do not support an estimate (e.g. an empty caliper bin).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace powergain
