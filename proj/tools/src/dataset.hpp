#pragma once

// Delimited-text ingestion for t-score and grouped (conditional) datasets.

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "powergain/estimator.hpp"
#include "powergain/sample.hpp"

namespace powergain::cli {

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Rows of a delimited file. The delimiter is a tab if the first data line
/// contains one, a comma otherwise. Blank lines and lines starting with '#'
/// are skipped.
struct DelimitedTable {
  char delimiter = ',';
  std::vector<std::string> header;  ///< empty when the file has no header row
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row
};

/// header_probe decides whether the first row is a header: it is one when
/// its first field does not parse as a number.
DelimitedTable read_delimited(std::istream& in, bool header_probe = true);

/// Strict finite-real parse of a whole field (surrounding whitespace allowed).
bool parse_real(const std::string& field, double& out);

/// Column `t` and optional `study_id`. Without a header the first column is t
/// and the second, if present, study_id. Every bad line is listed in the error.
TScoreSample parse_tscores(std::istream& in);
TScoreSample load_tscores(const std::string& path);

/// Header required: group_id, effect, std_error, weight; site_id optional.
/// Groups keep the order of first appearance.
std::vector<ConditionalGroup> parse_conditional(std::istream& in);
std::vector<ConditionalGroup> load_conditional(const std::string& path);

/// Raw bytes of a file; throws ParseError if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace powergain::cli
