#include "fna/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "fna/errors.hpp"
#include "fna/stats.hpp"

namespace fna {

namespace {

void check_aligned(const Dataset& data, const NuisanceFit& fit) {
  if (fit.n() != data.n()) {
    throw MisalignedFit("nuisance fit and dataset have different lengths");
  }
}

// Mean, plug-in SE (variance divisor n) and normal CI for a summand vector.
EstimateReport summarize(const std::vector<double>& summand, double level) {
  EstimateReport rep;
  rep.level = level;
  rep.n = static_cast<int>(summand.size());
  rep.estimate = mean_of(summand);
  const double sigma2 = variance_of(summand, static_cast<double>(rep.n));
  rep.se = std::sqrt(std::max(sigma2, 0.0) / static_cast<double>(rep.n));
  const double z = z_critical(level);
  rep.ci_lower = rep.estimate - z * rep.se;
  rep.ci_upper = rep.estimate + z * rep.se;
  return rep;
}

EstimateReport estimate_weighted(const Dataset& data, const NuisanceFit& fit,
                                 double rho, double level,
                                 const std::vector<int>* weights) {
  check_aligned(data, fit);
  if (!(level > 0.0 && level < 1.0)) {
    throw Error("confidence level must lie in (0,1)");
  }
  const int n = data.n();
  std::vector<double> summand(n);
  bool cap_exceeded = false;
  for (int i = 0; i < n; ++i) {
    const Preds preds{fit.e_hat(i), fit.mu0_hat(i), fit.mu1_hat(i)};
    double value;
    if (rho == 0.0) {
      // beta_0 is defined without the indicator (which is vacuous there).
      value = phi_beta(data.y(i), data.a(i), preds);
    } else {
      const double g = g_value(preds, rho);
      value = g >= 0.0 ? phi_beta(data.y(i), data.a(i), preds) -
                             rho * phi_gamma(data.y(i), data.a(i), preds)
                       : 0.0;
      if (rho < 0.0 &&
          g > std::min(preds.mu0, 1.0 - preds.mu1) + 1e-12) {
        cap_exceeded = true;
      }
    }
    if (weights != nullptr) value *= static_cast<double>((*weights)[i]);
    summand[i] = value;
  }
  EstimateReport rep = summarize(summand, level);
  rep.fh_cap_warning = cap_exceeded;
  return rep;
}

}  // namespace

double phi_beta(int y, int a, const Preds& preds) {
  const double dy = static_cast<double>(y);
  if (a == 1) {
    return -(dy - preds.mu1) / preds.e * preds.mu0 +
           preds.mu0 * (1.0 - preds.mu1);
  }
  return (dy - preds.mu0) / (1.0 - preds.e) * (1.0 - preds.mu1) +
         preds.mu0 * (1.0 - preds.mu1);
}

double phi_gamma(int y, int a, const Preds& preds) {
  const double v0 = preds.mu0 * (1.0 - preds.mu0);
  const double v1 = preds.mu1 * (1.0 - preds.mu1);
  const double sd = std::sqrt(v0 * v1);
  const double dy = static_cast<double>(y);
  if (a == 1) {
    return 0.5 * (1.0 - 2.0 * preds.mu1) * std::sqrt(v0 / v1) *
               (dy - preds.mu1) / preds.e +
           sd;
  }
  return 0.5 * (1.0 - 2.0 * preds.mu0) * std::sqrt(v1 / v0) *
             (dy - preds.mu0) / (1.0 - preds.e) +
         sd;
}

double g_value(const Preds& preds, double rho) {
  const double sd = std::sqrt(preds.mu0 * (1.0 - preds.mu0) * preds.mu1 *
                              (1.0 - preds.mu1));
  return preds.mu0 * (1.0 - preds.mu1) - rho * sd;
}

std::vector<InfluenceRow> influence_rows(const Dataset& data,
                                         const NuisanceFit& fit, double rho) {
  check_aligned(data, fit);
  std::vector<InfluenceRow> rows(data.n());
  for (int i = 0; i < data.n(); ++i) {
    const Preds preds{fit.e_hat(i), fit.mu0_hat(i), fit.mu1_hat(i)};
    InfluenceRow& r = rows[i];
    r.phi_beta = phi_beta(data.y(i), data.a(i), preds);
    r.phi_gamma = phi_gamma(data.y(i), data.a(i), preds);
    r.g_value = g_value(preds, rho);
    r.varphi =
        r.g_value >= 0.0 ? r.phi_beta - rho * r.phi_gamma : 0.0;
  }
  return rows;
}

EstimateReport estimate_beta(const Dataset& data, const NuisanceFit& fit,
                             double rho, double level) {
  return estimate_weighted(data, fit, rho, level, nullptr);
}

CurveReport sensitivity_curve(const Dataset& data, const NuisanceFit& fit,
                              const std::vector<double>& rho_grid,
                              double level) {
  check_aligned(data, fit);
  if (!std::is_sorted(rho_grid.begin(), rho_grid.end())) {
    throw Error("rho grid must be ascending");
  }
  CurveReport out;
  out.rho_grid = rho_grid;
  for (double rho : rho_grid) {
    const EstimateReport rep = estimate_beta(data, fit, rho, level);
    out.estimates.push_back(rep.estimate);
    out.se.push_back(rep.se);
    out.ci_lower.push_back(rep.ci_lower);
    out.ci_upper.push_back(rep.ci_upper);
  }
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < fit.n(); ++i) {
    lo += std::max(fit.mu0_hat(i) - fit.mu1_hat(i), 0.0);
    hi += std::min(fit.mu0_hat(i), 1.0 - fit.mu1_hat(i));
  }
  out.fh_lower = lo / static_cast<double>(fit.n());
  out.fh_upper = hi / static_cast<double>(fit.n());
  return out;
}

RhoSelection rho_upper_selection(const NuisanceFit& fit, double quantile) {
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw Error("quantile must lie in (0,1)");
  }
  RhoSelection sel;
  for (int i = 0; i < fit.n(); ++i) {
    const MarginalPair m{fit.mu0_hat(i), fit.mu1_hat(i)};
    if (!is_interior(m)) {
      ++sel.n_skipped;
      continue;
    }
    const RhoInterval feasible = rho_feasible_range(m);
    sel.per_unit_upper.push_back(feasible.rho_u);
    sel.per_unit_lower.push_back(feasible.rho_l);
  }
  if (sel.per_unit_upper.empty()) {
    throw DegenerateMarginal("no unit has interior fitted outcome means");
  }
  sel.rho_u = sample_quantile(sel.per_unit_upper, quantile);
  int covered = 0;
  for (double u : sel.per_unit_upper) {
    if (u <= sel.rho_u + 1e-12) ++covered;
  }
  sel.coverage =
      static_cast<double>(covered) / static_cast<double>(sel.per_unit_upper.size());
  return sel;
}

EstimateReport dr_ate(const Dataset& data, const NuisanceFit& fit,
                      double level) {
  check_aligned(data, fit);
  std::vector<double> summand(data.n());
  for (int i = 0; i < data.n(); ++i) {
    const double a = static_cast<double>(data.a(i));
    const double y = static_cast<double>(data.y(i));
    summand[i] = a * (y - fit.mu1_hat(i)) / fit.e_hat(i) -
                 (1.0 - a) * (y - fit.mu0_hat(i)) / (1.0 - fit.e_hat(i)) +
                 fit.mu1_hat(i) - fit.mu0_hat(i);
  }
  return summarize(summand, level);
}

PolicyBoundsReport policy_bounds(const Dataset& data, const NuisanceFit& fit,
                                 const std::vector<int>& policy,
                                 const RhoInterval& ri, double level) {
  check_aligned(data, fit);
  if (static_cast<int>(policy.size()) != data.n()) {
    throw MisalignedFit("policy vector and dataset have different lengths");
  }
  validate(ri);
  PolicyBoundsReport out;
  out.lower = estimate_weighted(data, fit, ri.rho_u, level, &policy);
  out.upper = estimate_weighted(data, fit, ri.rho_l, level, &policy);
  return out;
}

}  // namespace fna
