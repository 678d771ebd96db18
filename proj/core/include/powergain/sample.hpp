#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace powergain {

/// Reported t-scores with the identifier of the study that reported each one.
/// An empty study_id vector means "no identifiers" (every score its own cluster).
struct TScoreSample {
  std::vector<double> t;
  std::vector<std::string> study_id;

  [[nodiscard]] std::size_t size() const { return t.size(); }
  [[nodiscard]] bool empty() const { return t.empty(); }
  [[nodiscard]] bool has_study_ids() const { return !study_id.empty(); }
  [[nodiscard]] std::span<const double> scores() const { return t; }

  /// Throws DomainError when empty, when a score is not finite, or when
  /// study_id is present but of a different length.
  void validate() const;
};

}  // namespace powergain
