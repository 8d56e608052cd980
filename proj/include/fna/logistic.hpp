#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

namespace fna {

struct LogisticOptions {
  int max_iter = 100;
  double tol = 1e-8;
};

struct LogisticModel {
  double intercept = 0.0;
  Eigen::VectorXd coef;
  // Empty: plain maximum likelihood. Set: L1 penalty weight used in the fit.
  std::optional<double> l1_lambda;

  double predict_one(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
};

// Maximum-likelihood logistic regression by iteratively reweighted least
// squares. Throws SeparationDetected when the parameter norm diverges
// (perfect separation); callers fall back to the L1 variant. Constant labels
// yield the intercept-only degenerate fit rather than an error.
LogisticModel fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::VectorXi>& y,
                           LogisticOptions opts = {});

// L1-penalized logistic regression (coordinate descent on the penalized
// mean log-likelihood). Features are standardized internally and the
// intercept is unpenalized; coefficients come back on the original scale.
LogisticModel fit_logistic_l1(const Eigen::Ref<const Eigen::MatrixXd>& x,
                              const Eigen::Ref<const Eigen::VectorXi>& y,
                              double lambda);

// Smallest penalty that zeroes every coefficient; top of the lambda path.
double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x,
                  const Eigen::Ref<const Eigen::VectorXi>& y);

// Picks the penalty from a logarithmic grid by K-fold cross-validated mean
// held-out deviance (ties broken toward more shrinkage). Deterministic for a
// fixed seed.
double select_lambda_cv(const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXi>& y,
                        int folds = 5, std::uint64_t seed = 0);

// Mean Bernoulli deviance, -2/n sum[y log p + (1-y) log(1-p)], with
// predictions clipped away from 0/1.
double mean_deviance(const Eigen::Ref<const Eigen::VectorXd>& p,
                     const Eigen::Ref<const Eigen::VectorXi>& y);

}  // namespace fna
