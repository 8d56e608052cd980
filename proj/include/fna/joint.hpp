#pragma once

#include "fna/bounds.hpp"

namespace fna {

// Exact 2x2 joint distribution of the binary potential outcomes at a
// covariate point: pi_jk = P(Y0 = j, Y1 = k | X = x). The fraction harmed
// is pi10 and the fraction benefited is pi01.
struct JointTable {
  double pi00;
  double pi01;
  double pi10;
  double pi11;

  double mu0() const { return pi10 + pi11; }
  double mu1() const { return pi01 + pi11; }
};

// Constructs the unique joint with the given marginals and correlation:
// pi11 = mu0 mu1 + rho * sd_product, remaining cells from the margins.
// Throws InfeasibleRho if a cell would be negative beyond 1e-12.
JointTable joint_from_rho(const MarginalPair& m, double rho);

// Correlation, risk difference, risk ratio and odds ratio of Y1 on Y0.
// rho/rd are NaN for degenerate margins; rr and odds_ratio are empty when a
// denominator cell is zero.
AssociationMeasures measures_of(const JointTable& j);

struct ExtremeFna {
  double min_fna;
  double max_fna;
  JointTable witness_low;   // attains min_fna
  JointTable witness_high;  // attains max_fna
};

// Brute-force oracle: scans a grid of feasible correlations inside ri and
// returns the extremal fractions harmed with the witnessing joints. Throws
// EmptyFeasibleSet when ri does not intersect the feasible range.
ExtremeFna extremize_fna(const MarginalPair& m, const RhoInterval& ri,
                         int grid = 10000);

struct FhAttainability {
  bool lower_attained;  // pi01 = 0 or pi10 = 0
  bool upper_attained;  // pi11 = 0 or pi00 = 0
};

// Whether the Frechet-Hoeffding bounds are attained by this joint
// (cells compared to zero within 1e-12).
FhAttainability fh_attainability(const JointTable& j);

}  // namespace fna
