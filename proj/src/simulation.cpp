#include "fna/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "fna/errors.hpp"
#include "fna/estimators.hpp"
#include "fna/parallel.hpp"
#include "fna/rng.hpp"
#include "fna/stats.hpp"

namespace fna {

namespace {

const GaussHermite& quadrature() {
  static const GaussHermite gh(61);
  return gh;
}

DgpSpec two_covariate_case(const std::string& id, double l0, double l1) {
  DgpSpec s;
  s.case_id = id;
  s.p = 2;
  s.propensity_coef.resize(2);
  s.propensity_coef << 0.5, -0.5;
  s.outcome_coef.resize(2);
  s.outcome_coef << 0.5, 0.5;
  s.u_loading0 = l0;
  s.u_loading1 = l1;
  return s;
}

DgpSpec geometric_case(const std::string& id, int p) {
  DgpSpec s;
  s.case_id = id;
  s.p = p;
  s.propensity_coef = Eigen::VectorXd::Zero(p);
  s.propensity_coef(0) = 0.5;
  s.propensity_coef(1) = -0.5;
  s.outcome_coef.resize(p);
  for (int j = 0; j < p; ++j) s.outcome_coef(j) = std::pow(0.5, j);
  s.u_loading0 = 1.0;
  s.u_loading1 = 1.0;
  return s;
}

}  // namespace

DgpSpec DgpSpec::by_name(const std::string& case_id) {
  if (case_id == "C1") return two_covariate_case(case_id, 3.0, 1.5);
  if (case_id == "C2") return two_covariate_case(case_id, 2.0, 1.0);
  if (case_id == "C3") return two_covariate_case(case_id, 1.0, 0.5);
  if (case_id == "C4") return geometric_case(case_id, 20);
  if (case_id == "C5") return geometric_case(case_id, 50);
  if (case_id == "C6") return geometric_case(case_id, 100);
  throw ConfigError("unknown simulation case: " + case_id);
}

MarginalPair DgpSpec::true_mu(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double lin = outcome_coef.dot(x);
  const GaussHermite& gh = quadrature();
  const double m0 = gh.integrate(
      [&](double u) { return expit(intercept0 + lin + u_loading0 * u); });
  const double m1 = gh.integrate(
      [&](double u) { return expit(intercept1 + lin + u_loading1 * u); });
  return {m0, m1};
}

double DgpSpec::true_propensity(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return expit(propensity_intercept + propensity_coef.dot(x));
}

Generated generate(const DgpSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw Error("generate: n must be positive");
  Generated out;
  out.data.x.resize(n, spec.p);
  out.data.a.resize(n);
  out.data.y.resize(n);
  out.data.covariate_names = default_covariate_names(spec.p);
  out.latent.y0.resize(n);
  out.latent.y1.resize(n);
  out.latent.u.resize(n);
  out.latent.e_true.resize(n);
  out.latent.mu0_true.resize(n);
  out.latent.mu1_true.resize(n);

  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec.p; ++j) out.data.x(i, j) = rng.normal();
    const double u = rng.normal();
    const double lin = spec.outcome_coef.dot(out.data.x.row(i));
    const double e = spec.true_propensity(out.data.x.row(i));
    const int a = rng.bernoulli(e) ? 1 : 0;
    const int y0 =
        rng.bernoulli(expit(spec.intercept0 + lin + spec.u_loading0 * u)) ? 1 : 0;
    const int y1 =
        rng.bernoulli(expit(spec.intercept1 + lin + spec.u_loading1 * u)) ? 1 : 0;
    out.data.a(i) = a;
    out.data.y(i) = a == 1 ? y1 : y0;
    out.latent.u(i) = u;
    out.latent.y0(i) = y0;
    out.latent.y1(i) = y1;
    out.latent.e_true(i) = e;
  }

  // Latent conditional means are pure functions of the covariates.
  parallel_for(0, n, [&](int i) {
    const MarginalPair m = spec.true_mu(out.data.x.row(i));
    out.latent.mu0_true(i) = m.mu0;
    out.latent.mu1_true(i) = m.mu1;
  });
  return out;
}

namespace {

std::string truth_cache_key(const DgpSpec& spec, int n_outer, int n_inner,
                            std::uint64_t seed) {
  std::ostringstream os;
  os.precision(17);
  os << spec.case_id << '|' << spec.p << '|' << spec.propensity_intercept
     << '|' << spec.intercept0 << '|' << spec.intercept1 << '|'
     << spec.u_loading0 << '|' << spec.u_loading1 << '|';
  for (int j = 0; j < spec.outcome_coef.size(); ++j) {
    os << spec.outcome_coef(j) << ',';
  }
  os << '|' << n_outer << '|' << n_inner << '|' << seed;
  return os.str();
}

}  // namespace

std::vector<double> true_beta_multi(const DgpSpec& spec,
                                    const std::vector<double>& rhos,
                                    int n_outer, int n_inner,
                                    std::uint64_t seed) {
  if (n_outer < 1 || n_inner < 1) {
    throw Error("true_beta: outer and inner sizes must be positive");
  }
  const int n_rho = static_cast<int>(rhos.size());
  const int block_size = 4096;
  const int blocks = (n_outer + block_size - 1) / block_size;
  std::vector<std::vector<double>> block_sums(
      blocks, std::vector<double>(n_rho, 0.0));

  parallel_for(0, blocks, [&](int b) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    const int lo = b * block_size;
    const int hi = std::min(lo + block_size, n_outer);
    Eigen::VectorXd x(spec.p);
    std::vector<double>& acc = block_sums[b];
    for (int i = lo; i < hi; ++i) {
      for (int j = 0; j < spec.p; ++j) x(j) = rng.normal();
      const double lin = spec.outcome_coef.dot(x);
      double s0 = 0.0, s1 = 0.0;
      for (int k = 0; k < n_inner; ++k) {
        const double u = rng.normal();
        s0 += expit(spec.intercept0 + lin + spec.u_loading0 * u);
        s1 += expit(spec.intercept1 + lin + spec.u_loading1 * u);
      }
      const double mu0 = s0 / static_cast<double>(n_inner);
      const double mu1 = s1 / static_cast<double>(n_inner);
      const double sd = std::sqrt(mu0 * (1 - mu0) * mu1 * (1 - mu1));
      const double indep = mu0 * (1 - mu1);
      for (int r = 0; r < n_rho; ++r) {
        acc[r] += std::max(indep - rhos[r] * sd, 0.0);
      }
    }
  });

  std::vector<double> out(n_rho, 0.0);
  for (int b = 0; b < blocks; ++b) {
    for (int r = 0; r < n_rho; ++r) out[r] += block_sums[b][r];
  }
  for (int r = 0; r < n_rho; ++r) out[r] /= static_cast<double>(n_outer);
  return out;
}

double true_beta(const DgpSpec& spec, double rho, int n_outer, int n_inner,
                 std::uint64_t seed) {
  static std::mutex cache_mutex;
  static std::map<std::pair<std::string, double>, double> cache;
  const std::string key = truth_cache_key(spec, n_outer, n_inner, seed);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    const auto it = cache.find({key, rho});
    if (it != cache.end()) return it->second;
  }
  const double value = true_beta_multi(spec, {rho}, n_outer, n_inner, seed)[0];
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache[{key, rho}] = value;
  }
  return value;
}

std::vector<MetricsRow> run_study(const DgpSpec& spec, int n,
                                  const std::vector<double>& rho_list,
                                  int replications, const StudyOptions& opts,
                                  std::uint64_t master_seed) {
  if (replications < 2) throw Error("run_study: need at least 2 replications");
  const int n_rho = static_cast<int>(rho_list.size());

  const std::vector<double> beta_true =
      true_beta_multi(spec, rho_list, opts.n_outer_truth, opts.n_inner_truth,
                      derive_seed(master_seed, 0x717573'74ULL));

  struct RepResult {
    std::vector<double> estimate;
    std::vector<double> se;
  };
  std::vector<RepResult> results(replications);

  CrossFitOptions cf;
  cf.folds = opts.folds;
  cf.model = opts.model;

  parallel_for(
      0, replications,
      [&](int rep) {
        const std::uint64_t rep_seed =
            opts.vary_seeds
                ? derive_seed(master_seed, 1 + static_cast<std::uint64_t>(rep))
                : derive_seed(master_seed, 1);
        try {
          const Generated gen = generate(spec, n, derive_seed(rep_seed, 11));
          const NuisanceFit fit =
              cross_fit(gen.data, cf, derive_seed(rep_seed, 22));
          RepResult& r = results[rep];
          r.estimate.resize(n_rho);
          r.se.resize(n_rho);
          for (int k = 0; k < n_rho; ++k) {
            const EstimateReport e =
                estimate_beta(gen.data, fit, rho_list[k], opts.level);
            r.estimate[k] = e.estimate;
            r.se[k] = e.se;
          }
        } catch (const FoldDegenerate& e) {
          throw FoldDegenerate("replication " + std::to_string(rep) + ": " +
                               e.what());
        }
      },
      opts.threads);

  const double z = z_critical(opts.level);
  std::vector<MetricsRow> rows;
  rows.reserve(n_rho);
  for (int k = 0; k < n_rho; ++k) {
    std::vector<double> est(replications), se(replications);
    int covered = 0;
    for (int rep = 0; rep < replications; ++rep) {
      est[rep] = results[rep].estimate[k];
      se[rep] = results[rep].se[k];
      if (std::abs(est[rep] - beta_true[k]) <= z * se[rep]) ++covered;
    }
    MetricsRow row;
    row.case_id = spec.case_id;
    row.rho = rho_list[k];
    row.beta_true = beta_true[k];
    row.bias = mean_of(est) - beta_true[k];
    row.sd = std::sqrt(variance_of(est, static_cast<double>(replications - 1)));
    row.ese = mean_of(se);
    row.cp95 =
        static_cast<double>(covered) / static_cast<double>(replications);
    row.n = n;
    row.replications = replications;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fna
