#include "dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace powergain::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

std::ptrdiff_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (lower(header[k]) == name) return static_cast<std::ptrdiff_t>(k);
  }
  return -1;
}

void throw_if_errors(const std::vector<std::string>& errors) {
  if (errors.empty()) return;
  std::ostringstream os;
  os << errors.size() << " malformed row(s):";
  const std::size_t shown = std::min<std::size_t>(errors.size(), 20);
  for (std::size_t k = 0; k < shown; ++k) os << "\n  " << errors[k];
  if (shown < errors.size()) os << "\n  ... and " << errors.size() - shown << " more";
  throw ParseError(os.str());
}

std::istream& open_or_throw(std::ifstream& in, const std::string& path) {
  in.open(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

}  // namespace

bool parse_real(const std::string& field, double& out) {
  const std::string s = trim(field);
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return false;
  out = v;
  return true;
}

DelimitedTable read_delimited(std::istream& in, bool header_probe) {
  DelimitedTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    if (first) {
      table.delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
      auto fields = split(line, table.delimiter);
      double probe = 0.0;
      first = false;
      if (header_probe && !fields.empty() && !parse_real(fields[0], probe)) {
        table.header = std::move(fields);
        continue;
      }
      table.rows.push_back(std::move(fields));
      table.line_numbers.push_back(line_no);
      continue;
    }
    table.rows.push_back(split(line, table.delimiter));
    table.line_numbers.push_back(line_no);
  }
  return table;
}

TScoreSample parse_tscores(std::istream& in) {
  const DelimitedTable table = read_delimited(in);
  std::ptrdiff_t t_col = 0;
  std::ptrdiff_t id_col = -1;
  if (!table.header.empty()) {
    t_col = column_index(table.header, "t");
    if (t_col < 0) throw ParseError("line 1: header has no 't' column");
    id_col = column_index(table.header, "study_id");
  } else if (!table.rows.empty() && table.rows.front().size() >= 2) {
    id_col = 1;
  }
  if (table.rows.empty()) throw ParseError("dataset contains no t-scores");

  TScoreSample sample;
  std::vector<std::string> errors;
  sample.t.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    if (static_cast<std::ptrdiff_t>(row.size()) <= std::max(t_col, id_col)) {
      errors.push_back("line " + std::to_string(line) + ": expected at least " +
                       std::to_string(std::max(t_col, id_col) + 1) + " fields, found " +
                       std::to_string(row.size()));
      continue;
    }
    double t = 0.0;
    if (!parse_real(row[t_col], t)) {
      errors.push_back("line " + std::to_string(line) + ": cannot parse '" + row[t_col] +
                       "' as a finite real t-score");
      continue;
    }
    sample.t.push_back(t);
    if (id_col >= 0) {
      if (row[id_col].empty()) {
        errors.push_back("line " + std::to_string(line) + ": empty study_id");
        continue;
      }
      sample.study_id.push_back(row[id_col]);
    }
  }
  throw_if_errors(errors);
  return sample;
}

TScoreSample load_tscores(const std::string& path) {
  std::ifstream in;
  return parse_tscores(open_or_throw(in, path));
}

std::vector<ConditionalGroup> parse_conditional(std::istream& in) {
  const DelimitedTable table = read_delimited(in);
  if (table.header.empty()) {
    throw ParseError("line 1: grouped dataset needs a header with group_id, effect, std_error, weight");
  }
  const char* required[] = {"group_id", "effect", "std_error", "weight"};
  std::vector<std::string> missing;
  std::ptrdiff_t cols[4];
  for (int k = 0; k < 4; ++k) {
    cols[k] = column_index(table.header, required[k]);
    if (cols[k] < 0) missing.emplace_back(required[k]);
  }
  if (!missing.empty()) {
    std::string msg = "line 1: missing required column(s):";
    for (const auto& m : missing) msg += " " + m;
    throw ParseError(msg);
  }
  const std::ptrdiff_t site_col = column_index(table.header, "site_id");
  if (table.rows.empty()) throw ParseError("grouped dataset has no rows");

  std::vector<ConditionalGroup> groups;
  std::map<std::string, std::size_t> index;
  std::vector<std::string> errors;
  const std::ptrdiff_t widest = std::max({cols[0], cols[1], cols[2], cols[3], site_col});
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = "line " + std::to_string(table.line_numbers[r]) + ": ";
    if (static_cast<std::ptrdiff_t>(row.size()) <= widest) {
      errors.push_back(where + "expected " + std::to_string(widest + 1) + " fields, found " +
                       std::to_string(row.size()));
      continue;
    }
    double vals[3];
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
      if (!parse_real(row[cols[k + 1]], vals[k])) {
        errors.push_back(where + "cannot parse " + required[k + 1] + " '" + row[cols[k + 1]] + "'");
        ok = false;
      }
    }
    if (!ok) continue;
    if (!(vals[1] > 0.0)) {
      errors.push_back(where + "std_error must be positive");
      continue;
    }
    if (vals[2] < 0.0) {
      errors.push_back(where + "weight must be non-negative");
      continue;
    }
    auto [it, inserted] = index.try_emplace(row[cols[0]], groups.size());
    if (inserted) groups.emplace_back();
    ConditionalGroup& g = groups[it->second];
    g.effects.push_back(vals[0]);
    g.std_errors.push_back(vals[1]);
    g.weights.push_back(vals[2]);
    if (site_col >= 0) g.sites.push_back(row[site_col]);
  }
  throw_if_errors(errors);
  return groups;
}

std::vector<ConditionalGroup> load_conditional(const std::string& path) {
  std::ifstream in;
  return parse_conditional(open_or_throw(in, path));
}

std::string read_file(const std::string& path) {
  std::ifstream in;
  open_or_throw(in, path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace powergain::cli
