#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crplab/errors.hpp"

namespace crplab {

enum class Command { sample, exact, constants, lln, clt, martingale, diagnostics };
enum class Format { csv, json };

// Exit codes of the CLI front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitInternal = 4;

// --help was requested; what() carries the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Command command = Command::constants;
  std::vector<double> lambdas;
  std::vector<double> alphas;
  std::vector<double> thetas;  // `exact` only: fixed theta instead of lambda*n
  std::vector<std::int64_t> ns;
  std::int64_t replicates = 10000;
  std::uint64_t seed = 0;
  double delta = 1.0;
  double eps = 0.05;
  std::string out;  // empty: write the report to stdout
  Format format = Format::csv;
  int threads = 0;  // 0: keep the process-wide default
};

// Flags (repeatable where plural) plus an optional --config TOML/INI file;
// command-line values override file values. Violations raise UsageError
// naming the offending token. CRPLAB_OUT_DIR prefixes a relative --out.
ExperimentConfig parse_config(int argc, const char* const* argv);

// Everything the runner produced for one config. Rows are numeric; NaN marks
// a column that does not apply to the row. The results section is a
// deterministic function of the config alone (worker count excluded), so
// reruns reproduce it byte for byte.
struct RunReport {
  ExperimentConfig config;
  std::string config_echo;  // canonical one-line echo of result-affecting settings
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> timings_ms;  // per cell; excluded from results
  int threads_used = 1;

  std::string results_section() const;       // canonical CSV bytes (echo + header + rows)
  std::string render(Format format) const;   // results section plus trailing metadata
};

RunReport run(const ExperimentConfig& config);

// Temp-file-and-rename write; no partially written report is observable.
void write_report_atomic(const std::string& path, const std::string& content);

// Full pipeline: parse, run, emit; maps errors to exit codes and writes a
// one-line machine-readable error record to stderr on failure.
int run_cli(int argc, const char* const* argv);

}  // namespace crplab
