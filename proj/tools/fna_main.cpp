#include <CLI11.hpp>

#include <cstdlib>
#include <string>

#include "fna/cli.hpp"

namespace {

// FNA_FOLDS / FNA_LEVEL override the built-in defaults; explicit flags win.
void apply_env_defaults(fna::RunConfig& cfg) {
  if (const char* folds = std::getenv("FNA_FOLDS")) {
    cfg.folds = std::atoi(folds);
  }
  if (const char* level = std::getenv("FNA_LEVEL")) {
    cfg.level = std::atof(level);
  }
}

void add_common(CLI::App* cmd, fna::RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed,
                  "RNG seed; omitted -> drawn from entropy and recorded");
  cmd->add_option("--output", cfg.output_path, "JSON report file (default stdout)");
  cmd->add_flag("--timing", cfg.timing,
                "record wall time (breaks byte-identical reruns)");
}

void add_data_options(CLI::App* cmd, fna::RunConfig& cfg) {
  cmd->add_option("--input", cfg.input_path, "CSV with columns y, a, covariates");
  cmd->add_option("--covariates", cfg.covariates,
                  "explicit covariate columns (default: all non-y/a)");
  cmd->add_option("--folds", cfg.folds, "cross-fitting folds");
  cmd->add_option("--model", cfg.model, "nuisance model: plain | l1cv (default plain)");
  cmd->add_option("--level", cfg.level, "confidence level");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bounds and cross-fitted estimates of the fraction negatively affected "
      "by a binary treatment, with correlation sensitivity analysis"};
  app.require_subcommand(1);

  fna::RunConfig cfg;
  apply_env_defaults(cfg);

  CLI::App* bounds = app.add_subcommand(
      "bounds", "closed-form bounds from supplied or estimated marginals");
  bounds->add_option("--mu0", cfg.mu0, "control-arm mean at the point");
  bounds->add_option("--mu1", cfg.mu1, "treated-arm mean at the point");
  bounds->add_option("--rho-l", cfg.rho_l, "assumed lower correlation");
  bounds->add_option("--rho-u", cfg.rho_u, "assumed upper correlation");
  add_data_options(bounds, cfg);
  add_common(bounds, cfg);

  CLI::App* rho_range = app.add_subcommand(
      "rho-range", "per-unit feasible correlation range and quantile pick");
  rho_range->add_option("--quantile", cfg.quantile, "selection quantile");
  rho_range->add_option("--rho-u", cfg.rho_u, "report coverage of this value");
  rho_range->add_option("--table", cfg.table_path, "per-unit CSV output");
  add_data_options(rho_range, cfg);
  add_common(rho_range, cfg);

  CLI::App* estimate =
      app.add_subcommand("estimate", "cross-fitted estimate at one rho");
  estimate->add_option("--rho", cfg.rho, "sensitivity parameter (default 0)");
  add_data_options(estimate, cfg);
  add_common(estimate, cfg);

  CLI::App* curve =
      app.add_subcommand("curve", "estimates over a rho grid, plot-ready");
  curve->add_option("--rho-grid", cfg.rho_grid,
                    "grid as start:stop:step or comma list");
  curve->add_option("--table", cfg.table_path, "curve CSV output");
  add_data_options(curve, cfg);
  add_common(curve, cfg);

  CLI::App* ate = app.add_subcommand("ate", "doubly robust average treatment effect");
  add_data_options(ate, cfg);
  add_common(ate, cfg);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "replication study for the benchmark cases C1-C6");
  simulate->add_option("--case", cfg.sim_case, "C1..C6");
  simulate->add_option("--rho", cfg.rho_grid,
                       "rho list (comma separated) or start:stop:step");
  simulate->add_option("--n", cfg.sim_n, "sample size per replication");
  simulate->add_option("--reps", cfg.sim_reps, "number of replications");
  simulate->add_option("--folds", cfg.folds, "cross-fitting folds");
  simulate->add_option("--model", cfg.model,
                       "plain | l1cv (default: l1cv for C4-C6, else plain)");
  simulate->add_option("--threads", cfg.threads, "0 = all cores");
  simulate->add_option("--table", cfg.table_path, "metrics CSV output");
  simulate->add_option("--level", cfg.level, "confidence level");
  add_common(simulate, cfg);

  CLI11_PARSE(app, argc, argv);

  cfg.command = app.get_subcommands().front()->get_name();
  return fna::run_command(cfg);
}
