#include "fna/crossfit.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "fna/errors.hpp"
#include "fna/logistic.hpp"
#include "fna/rng.hpp"

namespace fna {

void validate(const Dataset& d) {
  const int n = d.n();
  if (n < 1 || d.p() < 1) {
    throw InvalidDataset("dataset needs at least one row and one covariate");
  }
  if (d.a.size() != n || d.y.size() != n) {
    throw InvalidDataset("treatment/outcome length does not match covariates");
  }
  if (!d.x.allFinite()) {
    throw InvalidDataset("covariates contain non-finite values");
  }
  int treated = 0;
  for (int i = 0; i < n; ++i) {
    if (d.a(i) != 0 && d.a(i) != 1) {
      throw InvalidDataset("treatment must be 0/1 (row " + std::to_string(i + 1) + ")");
    }
    if (d.y(i) != 0 && d.y(i) != 1) {
      throw InvalidDataset("outcome must be 0/1 (row " + std::to_string(i + 1) + ")");
    }
    treated += d.a(i);
  }
  if (treated == 0 || treated == n) {
    throw InvalidDataset("both treatment arms must be nonempty");
  }
}

std::vector<std::string> default_covariate_names(int p) {
  std::vector<std::string> names(p);
  for (int j = 0; j < p; ++j) names[j] = "x" + std::to_string(j + 1);
  return names;
}

Eigen::VectorXi make_folds(int n, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error("make_folds: need at least 2 folds");
  if (folds > n) throw Error("make_folds: more folds than rows");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  Eigen::VectorXi assignment(n);
  for (int i = 0; i < n; ++i) assignment(order[i]) = i % folds;
  return assignment;
}

namespace {

struct Subset {
  Eigen::MatrixXd x;
  Eigen::VectorXi labels;
};

Subset gather(const Dataset& d, const std::vector<int>& rows, bool label_is_y) {
  Subset s;
  s.x.resize(rows.size(), d.p());
  s.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.x.row(i) = d.x.row(rows[i]);
    s.labels(i) = label_is_y ? d.y(rows[i]) : d.a(rows[i]);
  }
  return s;
}

LogisticModel fit_nuisance(const Subset& s, ModelSpec spec, int cv_folds,
                           std::uint64_t seed) {
  if (spec == ModelSpec::kL1Cv) {
    const double lambda = select_lambda_cv(s.x, s.labels, cv_folds, seed);
    return fit_logistic_l1(s.x, s.labels, lambda);
  }
  try {
    return fit_logistic(s.x, s.labels);
  } catch (const SeparationDetected&) {
    // Documented fallback: a light L1 penalty keeps the fit finite.
    const double lambda = std::max(0.01 * lambda_max(s.x, s.labels), 1e-6);
    return fit_logistic_l1(s.x, s.labels, lambda);
  }
}

}  // namespace

NuisanceFit cross_fit_with_folds(const Dataset& data,
                                 const Eigen::VectorXi& fold_assignment,
                                 const CrossFitOptions& opts,
                                 std::uint64_t seed) {
  validate(data);
  const int n = data.n();
  if (fold_assignment.size() != n) {
    throw Error("cross_fit: fold assignment length mismatch");
  }
  const int k_folds = fold_assignment.maxCoeff() + 1;
  if (k_folds < 2 || fold_assignment.minCoeff() < 0) {
    throw Error("cross_fit: fold ids must span 0..K-1 with K >= 2");
  }

  NuisanceFit fit;
  fit.e_hat.resize(n);
  fit.mu0_hat.resize(n);
  fit.mu1_hat.resize(n);
  fit.fold_assignment = fold_assignment;

  for (int k = 0; k < k_folds; ++k) {
    std::vector<int> train, test, train0, train1;
    for (int i = 0; i < n; ++i) {
      if (fold_assignment(i) == k) {
        test.push_back(i);
      } else {
        train.push_back(i);
        (data.a(i) == 0 ? train0 : train1).push_back(i);
      }
    }
    if (test.empty()) continue;
    if (train0.empty() || train1.empty()) {
      throw FoldDegenerate("fold " + std::to_string(k) +
                           ": complement lacks a treatment arm; use fewer folds");
    }

    // Outcomes constant across the whole complement leave nothing to fit;
    // a constant arm alone falls back to the intercept-only degenerate fit.
    bool y0 = false, y1 = false;
    for (int i : train) (data.y(i) == 1 ? y1 : y0) = true;
    if (!y0 || !y1) {
      throw FoldDegenerate("fold " + std::to_string(k) +
                           ": complement lacks an outcome label; use fewer folds");
    }

    const Subset e_data = gather(data, train, /*label_is_y=*/false);
    const Subset m0_data = gather(data, train0, /*label_is_y=*/true);
    const Subset m1_data = gather(data, train1, /*label_is_y=*/true);

    const LogisticModel e_model =
        fit_nuisance(e_data, opts.model, opts.cv_folds, derive_seed(seed, 3 * k));
    const LogisticModel mu0_model = fit_nuisance(
        m0_data, opts.model, opts.cv_folds, derive_seed(seed, 3 * k + 1));
    const LogisticModel mu1_model = fit_nuisance(
        m1_data, opts.model, opts.cv_folds, derive_seed(seed, 3 * k + 2));

    for (int idx : test) {
      const Eigen::VectorXd row = data.x.row(idx);
      fit.e_hat(idx) = std::clamp(e_model.predict_one(row), opts.eps_e,
                                  1.0 - opts.eps_e);
      fit.mu0_hat(idx) = std::clamp(mu0_model.predict_one(row), opts.eps_mu,
                                    1.0 - opts.eps_mu);
      fit.mu1_hat(idx) = std::clamp(mu1_model.predict_one(row), opts.eps_mu,
                                    1.0 - opts.eps_mu);
    }
  }
  return fit;
}

NuisanceFit cross_fit(const Dataset& data, const CrossFitOptions& opts,
                      std::uint64_t seed) {
  const Eigen::VectorXi folds =
      make_folds(data.n(), opts.folds, derive_seed(seed, 0));
  return cross_fit_with_folds(data, folds, opts, derive_seed(seed, 1));
}

}  // namespace fna
