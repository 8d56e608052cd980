#include "fna/joint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fna/errors.hpp"

namespace fna {

namespace {

constexpr double kCellTol = 1e-12;

double checked_cell(double v) {
  if (v < -kCellTol) {
    throw InfeasibleRho("joint cell would be negative for this correlation");
  }
  return std::max(v, 0.0);
}

}  // namespace

JointTable joint_from_rho(const MarginalPair& m, double rho) {
  validate(m);
  const double pi11 = checked_cell(m.mu0 * m.mu1 + rho * sd_product(m));
  const double pi10 = checked_cell(m.mu0 - pi11);
  const double pi01 = checked_cell(m.mu1 - pi11);
  const double pi00 = checked_cell(1.0 - pi11 - pi10 - pi01);
  return {pi00, pi01, pi10, pi11};
}

AssociationMeasures measures_of(const JointTable& j) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const MarginalPair m{j.mu0(), j.mu1()};
  AssociationMeasures out{nan, nan, std::nullopt, std::nullopt};

  const double sd = sd_product(m);
  if (sd > 0.0) {
    out.rho = (j.pi11 - m.mu0 * m.mu1) / sd;
  }
  if (m.mu0 > 0.0 && m.mu0 < 1.0) {
    const double p_given1 = j.pi11 / m.mu0;         // P(Y1=1 | Y0=1)
    const double p_given0 = j.pi01 / (1.0 - m.mu0); // P(Y1=1 | Y0=0)
    out.rd = p_given1 - p_given0;
    if (j.pi01 > 0.0) {
      out.rr = p_given1 / p_given0;
    }
    if (j.pi10 > 0.0 && j.pi01 > 0.0) {
      out.odds_ratio = (j.pi11 * j.pi00) / (j.pi10 * j.pi01);
    }
  }
  return out;
}

ExtremeFna extremize_fna(const MarginalPair& m, const RhoInterval& ri,
                         int grid) {
  validate(m);
  validate(ri);
  if (grid < 1) grid = 1;
  const RhoInterval feasible = rho_feasible_range(m);
  const double lo = std::max(ri.rho_l, feasible.rho_l);
  const double hi = std::min(ri.rho_u, feasible.rho_u);
  if (lo > hi) {
    throw EmptyFeasibleSet("rho interval does not intersect the feasible range");
  }

  ExtremeFna out{};
  out.min_fna = std::numeric_limits<double>::infinity();
  out.max_fna = -std::numeric_limits<double>::infinity();
  const int points = (hi > lo) ? std::max(grid, 2) : 1;
  for (int k = 0; k < points; ++k) {
    const double rho =
        (points == 1) ? lo : lo + (hi - lo) * k / static_cast<double>(points - 1);
    const JointTable j = joint_from_rho(m, rho);
    if (j.pi10 < out.min_fna) {
      out.min_fna = j.pi10;
      out.witness_low = j;
    }
    if (j.pi10 > out.max_fna) {
      out.max_fna = j.pi10;
      out.witness_high = j;
    }
  }
  return out;
}

FhAttainability fh_attainability(const JointTable& j) {
  return {j.pi01 <= kCellTol || j.pi10 <= kCellTol,
          j.pi11 <= kCellTol || j.pi00 <= kCellTol};
}

}  // namespace fna
