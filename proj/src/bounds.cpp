#include "fna/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "fna/errors.hpp"

namespace fna {

namespace {

constexpr double kRhoClampTol = 1e-9;

// Clamps rho into the feasible range, allowing estimation noise of up to
// kRhoClampTol past the endpoints.
double clamp_rho(double rho, const RhoInterval& feasible) {
  if (rho < feasible.rho_l - kRhoClampTol || rho > feasible.rho_u + kRhoClampTol) {
    throw InfeasibleRho("rho outside the feasible range for these marginals");
  }
  return std::clamp(rho, feasible.rho_l, feasible.rho_u);
}

}  // namespace

double tau(const MarginalPair& m) { return m.mu1 - m.mu0; }

double sd_product(const MarginalPair& m) {
  return std::sqrt(m.mu0 * (1.0 - m.mu0) * m.mu1 * (1.0 - m.mu1));
}

bool is_interior(const MarginalPair& m) {
  return m.mu0 > 0.0 && m.mu0 < 1.0 && m.mu1 > 0.0 && m.mu1 < 1.0;
}

void validate(const MarginalPair& m) {
  if (!(m.mu0 >= 0.0 && m.mu0 <= 1.0 && m.mu1 >= 0.0 && m.mu1 <= 1.0)) {
    throw Error("marginal means must lie in [0,1]");
  }
}

void validate(const RhoInterval& ri) {
  if (!(ri.rho_l >= -1.0 && ri.rho_u <= 1.0 && ri.rho_l <= ri.rho_u)) {
    throw Error("rho interval must satisfy -1 <= rho_l <= rho_u <= 1");
  }
}

BoundPair fh_bounds(const MarginalPair& m) {
  validate(m);
  return {std::max(m.mu0 - m.mu1, 0.0), std::min(m.mu0, 1.0 - m.mu1)};
}

RhoInterval rho_feasible_range(const MarginalPair& m) {
  validate(m);
  if (!is_interior(m)) {
    throw DegenerateMarginal("correlation undefined: a marginal is 0 or 1");
  }
  const double sd = sd_product(m);
  const double lo = -std::min((1.0 - m.mu0) * (1.0 - m.mu1), m.mu0 * m.mu1) / sd;
  const double hi = std::min(m.mu0 * (1.0 - m.mu1), m.mu1 * (1.0 - m.mu0)) / sd;
  return {lo, hi};
}

BoundPair sensitivity_bounds(const MarginalPair& m, const RhoInterval& ri) {
  validate(m);
  validate(ri);
  const double indep = m.mu0 * (1.0 - m.mu1);
  if (!is_interior(m)) {
    // Zero variance: the correlation constraint is vacuous.
    return {indep, indep};
  }
  const RhoInterval feasible = rho_feasible_range(m);
  const double rho_l = clamp_rho(ri.rho_l, feasible);
  const double rho_u = clamp_rho(ri.rho_u, feasible);
  const double sd = sd_product(m);
  return {std::max(indep - rho_u * sd, 0.0), std::max(indep - rho_l * sd, 0.0)};
}

BoundPair general_bounds(const MarginalPair& m, const RhoInterval& ri) {
  validate(m);
  validate(ri);
  const double indep = m.mu0 * (1.0 - m.mu1);
  const double sd = sd_product(m);
  double rho_l = ri.rho_l;
  double rho_u = ri.rho_u;
  if (is_interior(m)) {
    // Inside the feasible range the clamp is a no-op on the formulas (the
    // Frechet-Hoeffding envelope binds first); outside it keeps the bounds
    // ordered by snapping to the nearest feasible correlation.
    const RhoInterval feasible = rho_feasible_range(m);
    rho_l = std::clamp(rho_l, feasible.rho_l, feasible.rho_u);
    rho_u = std::clamp(rho_u, feasible.rho_l, feasible.rho_u);
  }
  const double lower = std::max({indep - rho_u * sd, m.mu0 - m.mu1, 0.0});
  const double upper =
      std::min({m.mu0, 1.0 - m.mu1, std::max(indep - rho_l * sd, 0.0)});
  return {lower, upper};
}

double rho_star_threshold(const MarginalPair& m) {
  validate(m);
  if (!is_interior(m)) {
    throw DegenerateMarginal("threshold undefined: a marginal is 0 or 1");
  }
  if (!(tau(m) > 0.0)) {
    throw NotApplicable("threshold requires tau > 0; lower bound is already positive");
  }
  return std::sqrt(m.mu0 * (1.0 - m.mu1) / ((1.0 - m.mu0) * m.mu1));
}

double rho_star_from_odds_ratio(double or_ay) {
  if (!(or_ay > 0.0)) {
    throw NotApplicable("odds ratio must be positive");
  }
  return std::sqrt(1.0 / or_ay);
}

LowerBoundParts lower_bound_decomposed(const MarginalPair& m, double rho_u) {
  validate(m);
  if (!is_interior(m)) {
    throw DegenerateMarginal("decomposition undefined: a marginal is 0 or 1");
  }
  const RhoInterval feasible = rho_feasible_range(m);
  if (rho_u < -kRhoClampTol || rho_u > feasible.rho_u + kRhoClampTol) {
    throw InfeasibleRho("rho_u must lie in [0, feasible upper bound]");
  }
  rho_u = std::clamp(rho_u, 0.0, feasible.rho_u);

  const double t = tau(m);
  const double cross = (1.0 - m.mu0) * m.mu1;
  const double numerator = std::max(-t + (1.0 - rho_u * rho_u) * cross, 0.0);
  const double root_indep = std::sqrt(m.mu0 * (1.0 - m.mu1));
  const double factor = root_indep / (root_indep + rho_u * std::sqrt(cross));
  return {numerator * factor, t < (1.0 - rho_u * rho_u) * cross};
}

UpperBoundCaps upper_bound_caps(const MarginalPair& m) {
  validate(m);
  const double t = tau(m);
  return {(1.0 - t) / 2.0, (1.0 - t) * (1.0 - t) / 4.0};
}

double fna_given_rho(const MarginalPair& m, double rho) {
  validate(m);
  const double indep = m.mu0 * (1.0 - m.mu1);
  if (!is_interior(m)) {
    return indep;
  }
  rho = clamp_rho(rho, rho_feasible_range(m));
  return indep - rho * sd_product(m);
}

BoundPair fpa_bounds(const MarginalPair& m, const RhoInterval& ri) {
  const BoundPair fna = general_bounds(m, ri);
  const double t = tau(m);
  return {std::clamp(fna.lower + t, 0.0, 1.0),
          std::clamp(fna.upper + t, 0.0, 1.0)};
}

}  // namespace fna
