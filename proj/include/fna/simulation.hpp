#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "fna/bounds.hpp"
#include "fna/crossfit.hpp"
#include "fna/dataset.hpp"

namespace fna {

// Data-generating process: standard normal covariates, logistic treatment,
// logistic potential outcomes sharing a latent standard normal U whose
// loadings induce the correlation between Y0 and Y1.
struct DgpSpec {
  std::string case_id = "custom";
  int p = 2;
  Eigen::VectorXd propensity_coef;   // A ~ Bernoulli(expit(x' coef))
  double propensity_intercept = 0.0;
  Eigen::VectorXd outcome_coef;      // shared linear term of both outcomes
  double intercept0 = 0.0;
  double intercept1 = 1.0;
  double u_loading0 = 0.0;
  double u_loading1 = 0.0;

  // Benchmark cases: C1-C3 are two-covariate designs with latent loadings
  // (3, 1.5), (2, 1), (1, 0.5); C4-C6 have p = 20/50/100 with geometric
  // outcome coefficients (1, 1/2, ..., 1/2^{p-1}) and unit loadings.
  static DgpSpec by_name(const std::string& case_id);

  // True conditional outcome means at a covariate point, integrating the
  // latent variable by Gauss-Hermite quadrature.
  MarginalPair true_mu(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  double true_propensity(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

// Per-unit ground truth retained by the generator for oracle checks.
struct LatentTruth {
  Eigen::VectorXi y0;
  Eigen::VectorXi y1;
  Eigen::VectorXd u;
  Eigen::VectorXd e_true;
  Eigen::VectorXd mu0_true;
  Eigen::VectorXd mu1_true;
};

struct Generated {
  Dataset data;
  LatentTruth latent;
};

Generated generate(const DgpSpec& spec, int n, std::uint64_t seed);

// Population beta_rho by nested Monte Carlo: n_outer covariate draws, each
// with n_inner latent draws for the conditional means, averaging
// max{mu0(1-mu1) - rho sd, 0}. Results are memoized per argument tuple.
double true_beta(const DgpSpec& spec, double rho, int n_outer = 100000,
                 int n_inner = 1000, std::uint64_t seed = 20240901);

// Same outer/inner draws reused across a whole rho list.
std::vector<double> true_beta_multi(const DgpSpec& spec,
                                    const std::vector<double>& rhos,
                                    int n_outer = 100000, int n_inner = 1000,
                                    std::uint64_t seed = 20240901);

struct MetricsRow {
  std::string case_id;
  double rho;
  double beta_true;
  double bias;
  double sd;    // Monte Carlo standard deviation of the point estimates
  double ese;   // mean of the estimated standard errors
  double cp95;  // coverage of the (level) confidence intervals
  int n;
  int replications;
};

struct StudyOptions {
  int folds = 2;
  ModelSpec model = ModelSpec::kPlain;
  double level = 0.95;
  int n_outer_truth = 100000;
  int n_inner_truth = 1000;
  int threads = 0;        // 0 = hardware concurrency
  bool vary_seeds = true; // false: every replication reuses the master seed
};

// Replicated study: per replication generate -> cross_fit -> estimate at
// each rho; aggregates bias / SD / ESE / coverage against the Monte Carlo
// truth. Deterministic for a fixed master seed regardless of scheduling.
std::vector<MetricsRow> run_study(const DgpSpec& spec, int n,
                                  const std::vector<double>& rho_list,
                                  int replications, const StudyOptions& opts,
                                  std::uint64_t master_seed);

}  // namespace fna
