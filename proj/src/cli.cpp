#include "fna/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fna/bounds.hpp"
#include "fna/crossfit.hpp"
#include "fna/csv.hpp"
#include "fna/errors.hpp"
#include "fna/estimators.hpp"
#include "fna/rng.hpp"
#include "fna/simulation.hpp"
#include "fna/stats.hpp"

namespace fna {

namespace {

using nlohmann::json;

json to_json(const BoundPair& b) {
  return json{{"lower", b.lower}, {"upper", b.upper}};
}

json to_json(const EstimateReport& r) {
  return json{{"estimate", r.estimate}, {"se", r.se},
              {"ci_lower", r.ci_lower},  {"ci_upper", r.ci_upper},
              {"level", r.level},        {"n", r.n},
              {"fh_cap_warning", r.fh_cap_warning}};
}

json config_json(const RunConfig& cfg, std::uint64_t resolved_seed) {
  json j;
  j["command"] = cfg.command;
  j["input"] = cfg.input_path.empty() ? json() : json(cfg.input_path);
  j["covariates"] = cfg.covariates;
  j["mu0"] = cfg.mu0 ? json(*cfg.mu0) : json();
  j["mu1"] = cfg.mu1 ? json(*cfg.mu1) : json();
  j["rho"] = cfg.rho ? json(*cfg.rho) : json();
  j["rho_l"] = cfg.rho_l ? json(*cfg.rho_l) : json();
  j["rho_u"] = cfg.rho_u ? json(*cfg.rho_u) : json();
  j["rho_grid"] = cfg.rho_grid.empty() ? json() : json(cfg.rho_grid);
  j["folds"] = cfg.folds;
  j["model"] = cfg.model;
  j["quantile"] = cfg.quantile;
  j["level"] = cfg.level;
  j["seed"] = resolved_seed;
  j["output"] = cfg.output_path.empty() ? json() : json(cfg.output_path);
  j["table"] = cfg.table_path.empty() ? json() : json(cfg.table_path);
  j["case"] = cfg.sim_case;
  j["sim_n"] = cfg.sim_n;
  j["sim_reps"] = cfg.sim_reps;
  j["threads"] = cfg.threads;
  return j;
}

ModelSpec parse_model(const std::string& name) {
  if (name == "plain") return ModelSpec::kPlain;
  if (name == "l1cv" || name == "l1_cv") return ModelSpec::kL1Cv;
  throw ConfigError("unknown model spec: " + name + " (use plain or l1cv)");
}

// "auto" means plain logistic everywhere except the wide simulation cases,
// whose benchmark protocol uses the L1-penalized fit.
std::string resolve_model(const RunConfig& cfg) {
  if (cfg.model != "auto") return cfg.model;
  if (cfg.command == "simulate" &&
      (cfg.sim_case == "C4" || cfg.sim_case == "C5" || cfg.sim_case == "C6")) {
    return "l1cv";
  }
  return "plain";
}

void validate_config(const RunConfig& cfg) {
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
    throw ConfigError("level must lie in (0,1)");
  }
  if (!(cfg.quantile > 0.0 && cfg.quantile < 1.0)) {
    throw ConfigError("quantile must lie in (0,1)");
  }
  if (cfg.folds < 2) throw ConfigError("folds must be at least 2");
  parse_model(cfg.model);
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open output file: " + path);
  out << text;
}

struct FittedData {
  Dataset data;
  NuisanceFit fit;
};

FittedData load_and_fit(const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.input_path.empty()) {
    throw ConfigError("command '" + cfg.command + "' requires --input");
  }
  FittedData fd{load_csv(cfg.input_path, cfg.covariates), {}};
  CrossFitOptions opts;
  opts.folds = cfg.folds;
  opts.model = parse_model(cfg.model);
  fd.fit = cross_fit(fd.data, opts, seed);
  return fd;
}

json run_bounds(const RunConfig& cfg, std::uint64_t seed, json& warnings) {
  json res;
  if (cfg.mu0 && cfg.mu1) {
    const MarginalPair m{*cfg.mu0, *cfg.mu1};
    res["pointwise"] = true;
    res["marginals"] = {{"mu0", m.mu0},
                        {"mu1", m.mu1},
                        {"tau", tau(m)},
                        {"sd_product", sd_product(m)}};
    res["fh_bounds"] = to_json(fh_bounds(m));
    const UpperBoundCaps caps = upper_bound_caps(m);
    res["upper_bound_caps"] = {{"fh_cap", caps.fh_cap},
                               {"indep_cap", caps.indep_cap}};
    if (is_interior(m)) {
      const RhoInterval feasible = rho_feasible_range(m);
      res["rho_feasible_range"] = {{"rho_l", feasible.rho_l},
                                   {"rho_u", feasible.rho_u}};
      if (tau(m) > 0.0) {
        res["rho_star_threshold"] = rho_star_threshold(m);
      }
      if (cfg.rho_l || cfg.rho_u) {
        const RhoInterval ri{cfg.rho_l.value_or(0.0),
                             cfg.rho_u.value_or(feasible.rho_u)};
        res["rho_interval"] = {{"rho_l", ri.rho_l}, {"rho_u", ri.rho_u}};
        res["general_bounds"] = to_json(general_bounds(m, ri));
        res["fpa_bounds"] = to_json(fpa_bounds(m, ri));
        if (ri.rho_u >= 0.0 && ri.rho_u <= feasible.rho_u) {
          const LowerBoundParts parts = lower_bound_decomposed(m, ri.rho_u);
          res["lower_bound_decomposed"] = {
              {"value", parts.value},
              {"harmful_best_case", parts.harmful_best_case}};
        }
      }
    } else {
      warnings.push_back("degenerate marginal: correlation range undefined");
    }
    return res;
  }

  // Population plug-in bounds from estimated marginals.
  const FittedData fd = load_and_fit(cfg, seed);
  const int n = fd.data.n();
  double fh_lo = 0.0, fh_hi = 0.0, prop_lo = 0.0, prop_hi = 0.0;
  const RhoInterval ri{cfg.rho_l.value_or(0.0), cfg.rho_u.value_or(1.0)};
  for (int i = 0; i < n; ++i) {
    const MarginalPair m{fd.fit.mu0_hat(i), fd.fit.mu1_hat(i)};
    const BoundPair fh = fh_bounds(m);
    fh_lo += fh.lower;
    fh_hi += fh.upper;
    const BoundPair gb = general_bounds(m, ri);
    prop_lo += gb.lower;
    prop_hi += gb.upper;
  }
  res["pointwise"] = false;
  res["n"] = n;
  res["fh_bounds"] = {{"lower", fh_lo / n}, {"upper", fh_hi / n}};
  res["rho_interval"] = {{"rho_l", ri.rho_l}, {"rho_u", ri.rho_u}};
  res["proposed_bounds"] = {{"lower", prop_lo / n}, {"upper", prop_hi / n}};
  return res;
}

json run_rho_range(const RunConfig& cfg, std::uint64_t seed) {
  const FittedData fd = load_and_fit(cfg, seed);
  const RhoSelection sel = rho_upper_selection(fd.fit, cfg.quantile);
  json res;
  res["quantile"] = cfg.quantile;
  res["rho_u_selected"] = sel.rho_u;
  res["coverage"] = sel.coverage;
  res["n_units"] = static_cast<int>(sel.per_unit_upper.size());
  res["n_skipped"] = sel.n_skipped;
  auto summary = [](std::vector<double> v) {
    json s;
    s["min"] = *std::min_element(v.begin(), v.end());
    s["q05"] = sample_quantile(v, 0.05);
    s["median"] = sample_quantile(v, 0.5);
    s["q95"] = sample_quantile(v, 0.95);
    s["max"] = *std::max_element(v.begin(), v.end());
    return s;
  };
  res["upper_summary"] = summary(sel.per_unit_upper);
  res["lower_summary"] = summary(sel.per_unit_lower);
  if (cfg.rho_u) {
    int covered = 0;
    for (double u : sel.per_unit_upper) {
      if (u <= *cfg.rho_u + 1e-12) ++covered;
    }
    res["coverage_at_rho_u"] =
        static_cast<double>(covered) / sel.per_unit_upper.size();
  }
  if (!cfg.table_path.empty()) {
    std::ostringstream table;
    table << "rho_lower,rho_upper\n";
    for (std::size_t i = 0; i < sel.per_unit_upper.size(); ++i) {
      table << format_value(sel.per_unit_lower[i]) << ','
            << format_value(sel.per_unit_upper[i]) << '\n';
    }
    write_text(cfg.table_path, table.str());
  }
  return res;
}

json run_estimate(const RunConfig& cfg, std::uint64_t seed, json& warnings) {
  const FittedData fd = load_and_fit(cfg, seed);
  const double rho = cfg.rho.value_or(0.0);
  const EstimateReport rep = estimate_beta(fd.data, fd.fit, rho, cfg.level);
  if (rep.fh_cap_warning) {
    warnings.push_back(
        "rho < 0: uncapped estimand exceeds the Frechet-Hoeffding envelope "
        "for some units; capped estimation is not supported");
  }
  json res = to_json(rep);
  res["rho"] = rho;
  return res;
}

json run_curve(const RunConfig& cfg, std::uint64_t seed) {
  const FittedData fd = load_and_fit(cfg, seed);
  if (cfg.rho_grid.empty()) {
    throw ConfigError("curve requires --rho-grid start:stop:step");
  }
  const std::vector<double> grid = parse_rho_grid(cfg.rho_grid);
  const CurveReport curve = sensitivity_curve(fd.data, fd.fit, grid, cfg.level);
  json res;
  res["rho_grid"] = curve.rho_grid;
  res["estimates"] = curve.estimates;
  res["se"] = curve.se;
  res["ci_lower"] = curve.ci_lower;
  res["ci_upper"] = curve.ci_upper;
  res["fh_lower"] = curve.fh_lower;
  res["fh_upper"] = curve.fh_upper;
  if (!cfg.table_path.empty()) {
    std::ostringstream table;
    table << "rho,estimate,se,ci_lower,ci_upper,fh_lower,fh_upper\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
      table << format_value(curve.rho_grid[k]) << ','
            << format_value(curve.estimates[k]) << ','
            << format_value(curve.se[k]) << ','
            << format_value(curve.ci_lower[k]) << ','
            << format_value(curve.ci_upper[k]) << ','
            << format_value(curve.fh_lower) << ','
            << format_value(curve.fh_upper) << '\n';
    }
    write_text(cfg.table_path, table.str());
  }
  return res;
}

json run_ate(const RunConfig& cfg, std::uint64_t seed) {
  const FittedData fd = load_and_fit(cfg, seed);
  return to_json(dr_ate(fd.data, fd.fit, cfg.level));
}

json run_simulate(const RunConfig& cfg, std::uint64_t seed) {
  const DgpSpec spec = DgpSpec::by_name(cfg.sim_case);
  std::vector<double> rhos =
      cfg.rho_grid.empty() ? std::vector<double>{cfg.rho.value_or(0.0)}
                           : parse_rho_grid(cfg.rho_grid);
  StudyOptions opts;
  opts.folds = cfg.folds;
  opts.model = parse_model(cfg.model);
  opts.level = cfg.level;
  opts.threads = cfg.threads;
  const std::vector<MetricsRow> rows =
      run_study(spec, cfg.sim_n, rhos, cfg.sim_reps, opts, seed);

  json res;
  res["rows"] = json::array();
  for (const MetricsRow& r : rows) {
    res["rows"].push_back({{"case", r.case_id},
                           {"rho", r.rho},
                           {"beta_true", r.beta_true},
                           {"bias", r.bias},
                           {"sd", r.sd},
                           {"ese", r.ese},
                           {"cp95", r.cp95},
                           {"n", r.n},
                           {"replications", r.replications}});
  }
  if (!cfg.table_path.empty()) {
    std::ostringstream table;
    table << "case,rho,beta_true,bias,sd,ese,cp95,n,replications\n";
    for (const MetricsRow& r : rows) {
      table << r.case_id << ',' << format_value(r.rho) << ','
            << format_value(r.beta_true) << ',' << format_value(r.bias) << ','
            << format_value(r.sd) << ',' << format_value(r.ese) << ','
            << format_value(r.cp95) << ',' << r.n << ',' << r.replications
            << '\n';
    }
    write_text(cfg.table_path, table.str());
  }
  return res;
}

const char* error_kind(const Error& e) {
  if (dynamic_cast<const InfeasibleRho*>(&e)) return "InfeasibleRho";
  if (dynamic_cast<const DegenerateMarginal*>(&e)) return "DegenerateMarginal";
  if (dynamic_cast<const NotApplicable*>(&e)) return "NotApplicable";
  if (dynamic_cast<const EmptyFeasibleSet*>(&e)) return "EmptyFeasibleSet";
  if (dynamic_cast<const SeparationDetected*>(&e)) return "SeparationDetected";
  if (dynamic_cast<const FoldDegenerate*>(&e)) return "FoldDegenerate";
  if (dynamic_cast<const MisalignedFit*>(&e)) return "MisalignedFit";
  if (dynamic_cast<const InvalidDataset*>(&e)) return "InvalidDataset";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  return "Error";
}

}  // namespace

std::vector<double> parse_rho_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
        step <= 0.0 || stop < start) {
      throw ConfigError("bad rho grid '" + spec + "', want start:stop:step");
    }
    const int count = static_cast<int>(std::round((stop - start) / step)) + 1;
    for (int k = 0; k < count; ++k) {
      grid.push_back(std::min(start + k * step, stop));
    }
  } else {
    std::stringstream ss(spec);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        grid.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("bad rho value '" + cell + "' in grid spec");
      }
    }
  }
  if (grid.empty()) throw ConfigError("empty rho grid");
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw ConfigError("rho grid must be ascending");
  }
  return grid;
}

int run_command(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  RunConfig cfg = config;
  cfg.model = resolve_model(cfg);
  std::uint64_t resolved_seed = 0;
  if (cfg.seed) {
    resolved_seed = *cfg.seed;
  } else {
    std::random_device entropy;
    resolved_seed =
        (static_cast<std::uint64_t>(entropy()) << 32) ^ entropy();
  }

  json report;
  report["config"] = config_json(cfg, resolved_seed);
  report["warnings"] = json::array();
  report["timing"] = json();

  try {
    validate_config(cfg);
    json& warnings = report["warnings"];
    if (cfg.command == "bounds") {
      report["results"] = run_bounds(cfg, resolved_seed, warnings);
    } else if (cfg.command == "rho-range") {
      report["results"] = run_rho_range(cfg, resolved_seed);
    } else if (cfg.command == "estimate") {
      report["results"] = run_estimate(cfg, resolved_seed, warnings);
    } else if (cfg.command == "curve") {
      report["results"] = run_curve(cfg, resolved_seed);
    } else if (cfg.command == "ate") {
      report["results"] = run_ate(cfg, resolved_seed);
    } else if (cfg.command == "simulate") {
      report["results"] = run_simulate(cfg, resolved_seed);
    } else {
      throw ConfigError("unknown command: " + cfg.command);
    }
  } catch (const Error& e) {
    json err{{"type", error_kind(e)}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
      err["line"] = pe->line;
      err["column"] = pe->column;
    }
    report["error"] = err;
    std::cout << report.dump(2) << std::endl;
    return 1;
  } catch (const std::exception& e) {
    report["error"] = {{"type", "Error"}, {"message", e.what()}};
    std::cout << report.dump(2) << std::endl;
    return 1;
  }

  if (cfg.timing) {
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - started;
    report["timing"] = {{"seconds", elapsed.count()}};
  }
  const std::string text = report.dump(2) + "\n";
  if (cfg.output_path.empty()) {
    std::cout << text;
  } else {
    write_text(cfg.output_path, text);
  }
  return 0;
}

}  // namespace fna
