#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "fna/dataset.hpp"

namespace fna {

enum class ModelSpec {
  kPlain,  // maximum-likelihood logistic (falls back to L1 on separation)
  kL1Cv,   // L1-penalized logistic with cross-validated lambda
};

struct CrossFitOptions {
  int folds = 2;
  ModelSpec model = ModelSpec::kPlain;
  double eps_e = 0.01;    // propensity clip: [eps_e, 1-eps_e]
  double eps_mu = 0.001;  // outcome-mean clip: [eps_mu, 1-eps_mu]
  int cv_folds = 5;       // folds for lambda selection under kL1Cv
};

// Out-of-fold nuisance predictions: unit i's values come from models trained
// without i's fold. Immutable after construction; safe to share.
struct NuisanceFit {
  Eigen::VectorXd e_hat;
  Eigen::VectorXd mu0_hat;
  Eigen::VectorXd mu1_hat;
  Eigen::VectorXi fold_assignment;

  int n() const { return static_cast<int>(e_hat.size()); }
};

// Seeded uniform shuffle, then round-robin assignment; fold sizes differ by
// at most one.
Eigen::VectorXi make_folds(int n, int folds, std::uint64_t seed);

// Cross-fitting: for each fold, fits the propensity model on (X, A) and the
// per-arm outcome models on (X, Y) over the fold's complement, predicts on
// the fold, and clips. Throws FoldDegenerate when a complement lacks a
// treatment arm or an outcome label within an arm.
NuisanceFit cross_fit(const Dataset& data, const CrossFitOptions& opts,
                      std::uint64_t seed);

// Same, with a caller-supplied fold assignment (fold ids 0..K-1). The seed
// only feeds lambda selection under kL1Cv.
NuisanceFit cross_fit_with_folds(const Dataset& data,
                                 const Eigen::VectorXi& fold_assignment,
                                 const CrossFitOptions& opts,
                                 std::uint64_t seed);

}  // namespace fna
