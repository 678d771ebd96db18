#pragma once

// Subcommands of the powergain tool. Each returns a process exit code.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace powergain::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParseError = 2,
  kExitEstimationError = 3,
  kExitInvalidFlags = 4,
};

struct EstimateFlags {
  std::string dataset;
  double c2 = 2.0;
  double cv = 1.96;
  double alpha = 0.05;
  double sigma_t2 = 1.0;
  double const_c = 2.0;
  double const_d = 0.05;
  std::string scale_by = "tscores";
  bool no_pb = false;
  bool clamp_ci_at_zero = false;
  std::string out = "text";
  std::string output;  ///< file path; empty writes to stdout
};

struct CurveFlags {
  EstimateFlags base;
  std::string grid = "1,1.5,2,3,4";
};

struct SimulateFlags {
  std::optional<int> table;
  std::string dgp;
  std::string noise;
  std::optional<std::size_t> n;
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  double theta0 = 0.9;
  double c2 = 2.0;
  double cv = 1.96;
  double const_c = 2.0;
  double const_d = 0.05;
  unsigned threads = 0;
  std::string out = "csv";
  std::string output;
};

struct ConditionalFlags {
  std::string dataset;
  double c2 = 2.0;
  double cv = 1.96;
  std::string se = "iid";
  std::string out = "text";
  std::string output;
};

struct RenderFlags {
  std::string report;
  std::string out = "text";
  std::string output;
};

int cmd_estimate(const EstimateFlags& flags, std::ostream& out, std::ostream& err);
int cmd_curve(const CurveFlags& flags, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateFlags& flags, std::ostream& out, std::ostream& err);
int cmd_conditional(const ConditionalFlags& flags, std::ostream& out, std::ostream& err);
int cmd_render(const RenderFlags& flags, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Invalid flags exit with kExitInvalidFlags.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace powergain::cli
