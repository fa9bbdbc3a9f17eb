#pragma once

// Command-line front end. `run` is separate from argument parsing so tests
// can drive it directly.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace balmatch {

enum ExitCode : int { kExitPass = 0, kExitViolation = 1, kExitUsage = 2 };

struct RunConfig {
  std::string command;
  std::string mech;   // path to a mechanism config (or table file for validate-table)
  std::string mech2;  // second mechanism for equiv-sym and rank-sums
  std::optional<int> n;
  std::string mode = "exhaustive";  // exhaustive | sample
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;               // report path; empty writes the report to stdout
  std::string format = "json";   // json | csv (csv: tally only)
  int agent = 1;                 // lemma4: the broker
};

/// Executes one subcommand. Diagnostics go to `err`; the report goes to the
/// --out file or, without one, to `out`. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and runs. Usage errors return kExitUsage.
int run_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace balmatch
