#pragma once

#include <optional>

namespace fna {

// Conditional outcome means (mu0, mu1) = (E[Y|X=x,A=0], E[Y|X=x,A=1]) at a
// covariate point; the inputs to every closed-form bound.
struct MarginalPair {
  double mu0;
  double mu1;
};

// Assumed range for the correlation of the potential outcomes given X.
struct RhoInterval {
  double rho_l;
  double rho_u;
};

struct BoundPair {
  double lower;
  double upper;
};

// Association measures between the potential outcomes. rd/rho are NaN and
// rr/odds_ratio empty when a defining denominator vanishes.
struct AssociationMeasures {
  double rho;
  double rd;
  std::optional<double> rr;
  std::optional<double> odds_ratio;
};

double tau(const MarginalPair& m);

// sqrt(mu0(1-mu0) mu1(1-mu1)): the product of the conditional standard
// deviations of the two potential outcomes. Zero iff a marginal is 0 or 1.
double sd_product(const MarginalPair& m);

bool is_interior(const MarginalPair& m);

// Throws InvalidDataset-style domain errors for marginals outside [0,1].
void validate(const MarginalPair& m);
void validate(const RhoInterval& ri);

// Frechet-Hoeffding bounds on the fraction harmed at x:
// [max{mu0 - mu1, 0}, min{mu0, 1 - mu1}]. Sharp but attainable only when a
// diagonal (for the upper) or off-diagonal (for the lower) joint cell is 0.
BoundPair fh_bounds(const MarginalPair& m);

// Range of correlations compatible with the marginals alone. Always
// contains 0. Throws DegenerateMarginal when a marginal is 0 or 1.
RhoInterval rho_feasible_range(const MarginalPair& m);

// Sharp bounds under rho(x) in [rho_l, rho_u], where the interval must sit
// inside the feasible range (slack of 1e-9 is clamped, more throws
// InfeasibleRho). Degenerate marginals collapse both ends to mu0(1-mu1).
BoundPair sensitivity_bounds(const MarginalPair& m, const RhoInterval& ri);

// Sharp bounds for an arbitrary-sign interval: the sensitivity bounds
// intersected with the Frechet-Hoeffding envelope. No feasibility
// precondition; reduces to fh_bounds when ri covers the feasible range.
BoundPair general_bounds(const MarginalPair& m, const RhoInterval& ri);

// Smallest rho_u at which the lower bound reaches zero when tau > 0; equals
// the feasible upper endpoint and sqrt(1/OR_AY). Throws NotApplicable for
// tau <= 0 (the lower bound is then positive for every rho_u in range).
double rho_star_threshold(const MarginalPair& m);

// Same threshold expressed through the treatment-outcome odds ratio.
double rho_star_from_odds_ratio(double or_ay);

struct LowerBoundParts {
  double value;
  // True iff the lower bound is strictly positive, i.e. harm persists in the
  // best case: tau < (1 - rho_u^2)(1 - mu0) mu1.
  bool harmful_best_case;
};

// Factored form of the lower bound,
//   max{-tau + (1-rho_u^2)(1-mu0)mu1, 0} *
//     sqrt(mu0(1-mu1)) / (sqrt(mu0(1-mu1)) + rho_u sqrt((1-mu0)mu1)),
// numerically equal to the sensitivity lower bound.
LowerBoundParts lower_bound_decomposed(const MarginalPair& m, double rho_u);

struct UpperBoundCaps {
  double fh_cap;     // (1 - tau)/2    >= FH upper bound
  double indep_cap;  // (1 - tau)^2/4  >= mu0(1 - mu1)
};

UpperBoundCaps upper_bound_caps(const MarginalPair& m);

// Point value of the fraction harmed when the correlation is known exactly:
// mu0(1-mu1) - rho * sd_product. rho must lie in the feasible range (1e-9
// clamping slack); with a degenerate marginal rho is vacuous.
double fna_given_rho(const MarginalPair& m, double rho);

// Bounds on the fraction benefited; identical to the general bounds shifted
// by tau and clamped to [0,1].
BoundPair fpa_bounds(const MarginalPair& m, const RhoInterval& ri);

}  // namespace fna
