#pragma once

#include <vector>

#include "fna/bounds.hpp"
#include "fna/crossfit.hpp"
#include "fna/dataset.hpp"

namespace fna {

struct Preds {
  double e;
  double mu0;
  double mu1;
};

// Uncentered efficient influence function of beta_0 = E[mu0(X)(1-mu1(X))]:
//   (1-A)(Y-mu0)/(1-e) * (1-mu1) - A(Y-mu1)/e * mu0 + mu0(1-mu1).
double phi_beta(int y, int a, const Preds& preds);

// Uncentered efficient influence function of gamma = E[sd_product(X)]: the
// two weighted residual terms plus sd_product itself.
double phi_gamma(int y, int a, const Preds& preds);

// g(eta, rho) = mu0(1-mu1) - rho * sd_product; the conditional mean of
// phi_beta - rho * phi_gamma given X.
double g_value(const Preds& preds, double rho);

struct InfluenceRow {
  double phi_beta;
  double phi_gamma;
  double g_value;
  double varphi;  // indicator(g_value >= 0) * (phi_beta - rho * phi_gamma)
};

std::vector<InfluenceRow> influence_rows(const Dataset& data,
                                         const NuisanceFit& fit, double rho);

struct EstimateReport {
  double estimate = 0.0;
  double se = 0.0;  // sqrt(sigma^2 / n), plug-in variance with divisor n
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double level = 0.95;
  int n = 0;
  // Set for rho < 0 when the uncapped estimand exceeds a unit's
  // Frechet-Hoeffding envelope; the capped estimand has no estimator here.
  bool fh_cap_warning = false;
};

// Cross-fitted estimate of beta_rho with a plug-in normal confidence
// interval. At rho = 0 the summand is phi_beta with no indicator; otherwise
// it is indicator(g >= 0) * (phi_beta - rho * phi_gamma).
EstimateReport estimate_beta(const Dataset& data, const NuisanceFit& fit,
                             double rho, double level = 0.95);

struct CurveReport {
  std::vector<double> rho_grid;
  std::vector<double> estimates;
  std::vector<double> se;
  std::vector<double> ci_lower;
  std::vector<double> ci_upper;
  // Plug-in population Frechet-Hoeffding bounds from the same fit; constant
  // across the grid and reported alongside it.
  double fh_lower = 0.0;
  double fh_upper = 0.0;
};

// estimate_beta along an ascending rho grid.
CurveReport sensitivity_curve(const Dataset& data, const NuisanceFit& fit,
                              const std::vector<double>& rho_grid,
                              double level = 0.95);

struct RhoSelection {
  double rho_u;                       // empirical quantile of the unit bounds
  double coverage;                    // fraction of units with bound <= rho_u
  std::vector<double> per_unit_upper;
  std::vector<double> per_unit_lower;
  int n_skipped = 0;                  // degenerate-marginal units
};

// Per-unit feasible upper bounds of rho from the fitted outcome means, with
// the chosen sample quantile (default 0.95) as a data-driven rho_u.
RhoSelection rho_upper_selection(const NuisanceFit& fit,
                                 double quantile = 0.95);

// Doubly robust average treatment effect with influence-function SE.
EstimateReport dr_ate(const Dataset& data, const NuisanceFit& fit,
                      double level = 0.95);

struct PolicyBoundsReport {
  EstimateReport lower;  // evaluated at rho_u
  EstimateReport upper;  // evaluated at rho_l
};

// Bounds on the policy-weighted fraction harmed E[FNA(X) d(X)]: every
// summand is multiplied by the policy indicator.
PolicyBoundsReport policy_bounds(const Dataset& data, const NuisanceFit& fit,
                                 const std::vector<int>& policy,
                                 const RhoInterval& ri, double level = 0.95);

}  // namespace fna
