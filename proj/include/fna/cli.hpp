#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fna {

// Fully resolved invocation of one CLI subcommand. Field applicability
// depends on the command; everything lands in the emitted report so runs
// can be reproduced from their artifacts.
struct RunConfig {
  std::string command;  // bounds | rho-range | estimate | curve | ate | simulate

  // Data commands.
  std::string input_path;
  std::vector<std::string> covariates;  // empty: every non-y/a column

  // Closed-form bounds from supplied marginals.
  std::optional<double> mu0;
  std::optional<double> mu1;

  std::optional<double> rho;    // estimate
  std::optional<double> rho_l;  // bounds / curve defaults
  std::optional<double> rho_u;
  std::string rho_grid;  // "start:stop:step" or comma-separated list

  int folds = 2;
  // plain | l1cv | auto (plain, except the wide simulation cases C4-C6).
  std::string model = "auto";
  double quantile = 0.95;
  double level = 0.95;
  std::optional<std::uint64_t> seed;  // absent: drawn from entropy, recorded

  std::string output_path;  // JSON report destination ("" = stdout)
  std::string table_path;   // CSV table for curve / rho-range / simulate

  // simulate.
  std::string sim_case = "C1";
  int sim_n = 1000;
  int sim_reps = 500;
  int threads = 0;

  bool timing = false;  // opt-in: timing breaks byte-for-byte reproducibility
};

std::vector<double> parse_rho_grid(const std::string& spec);

// Executes the command, emits the JSON report (and CSV table when asked),
// and returns the process exit status. Failures produce a machine-readable
// error object on stdout and a nonzero status.
int run_command(const RunConfig& config);

}  // namespace fna
