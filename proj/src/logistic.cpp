#include "fna/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fna/errors.hpp"
#include "fna/rng.hpp"
#include "fna/stats.hpp"

namespace fna {

namespace {

constexpr double kDivergenceNorm = 30.0;
constexpr double kWeightFloor = 1e-10;
constexpr double kRidge = 1e-10;  // keeps collinear designs solvable
constexpr double kPredictionClip = 1e-12;

double clipped_label_mean(const Eigen::Ref<const Eigen::VectorXi>& y) {
  const double mean = y.cast<double>().mean();
  return std::clamp(mean, 1e-9, 1.0 - 1e-9);
}

struct Standardized {
  Eigen::MatrixXd xs;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  std::vector<bool> constant;  // sd below tolerance; coefficient pinned to 0
};

Standardized standardize(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  Standardized s;
  s.mean = x.colwise().mean();
  s.sd.resize(p);
  s.constant.assign(p, false);
  s.xs.resize(n, p);
  for (int j = 0; j < p; ++j) {
    const Eigen::VectorXd centered = x.col(j).array() - s.mean(j);
    const double var = centered.squaredNorm() / static_cast<double>(n);
    s.sd(j) = std::sqrt(var);
    if (s.sd(j) < 1e-12) {
      s.constant[j] = true;
      s.sd(j) = 1.0;
      s.xs.col(j).setZero();
    } else {
      s.xs.col(j) = centered / s.sd(j);
    }
  }
  return s;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Coordinate-descent fit on an already standardized design; parameters are
// on the standardized scale and updated in place (warm starts).
void cd_fit_standardized(const Standardized& s,
                         const Eigen::Ref<const Eigen::VectorXi>& y,
                         double lambda, double& b0, Eigen::VectorXd& b) {
  const int n = static_cast<int>(s.xs.rows());
  const int p = static_cast<int>(s.xs.cols());
  const double inv_n = 1.0 / static_cast<double>(n);
  const int max_outer = 100;
  const double outer_tol = 1e-8;
  const double inner_tol = 1e-10;

  Eigen::VectorXd eta(n), w(n), r(n);
  std::vector<int> active;
  active.reserve(p);

  for (int outer = 0; outer < max_outer; ++outer) {
    eta = (s.xs * b).array() + b0;
    double max_outer_change = 0.0;
    // Quadratic approximation at the current parameters.
    for (int i = 0; i < n; ++i) {
      const double pi = expit(eta(i));
      const double wi = std::max(pi * (1.0 - pi), kWeightFloor);
      w(i) = wi;
      // Working residual of z - eta with z = eta + (y - p)/w.
      r(i) = (static_cast<double>(y(i)) - pi) / wi;
    }
    Eigen::VectorXd denom(p);
    for (int j = 0; j < p; ++j) {
      denom(j) = s.constant[j]
                     ? 1.0
                     : inv_n * (w.array() * s.xs.col(j).array().square()).sum();
    }
    const double w_sum = w.sum();

    // Inner coordinate descent on the fixed quadratic; sweep everything
    // once, then iterate the active set until stable.
    bool full_sweep = true;
    for (int pass = 0; pass < 1000; ++pass) {
      double max_change = 0.0;
      active.clear();
      for (int j = 0; j < p; ++j) {
        if (s.constant[j]) continue;
        if (!full_sweep && b(j) == 0.0) continue;
        const double grad =
            inv_n * (w.array() * s.xs.col(j).array() * r.array()).sum();
        const double u = grad + denom(j) * b(j);
        const double bj = soft_threshold(u, lambda) / denom(j);
        const double delta = bj - b(j);
        if (delta != 0.0) {
          r -= delta * s.xs.col(j);
          b(j) = bj;
          max_change = std::max(max_change, std::abs(delta));
        }
        if (bj != 0.0) active.push_back(j);
      }
      const double d0 = (w.array() * r.array()).sum() / w_sum;
      if (d0 != 0.0) {
        b0 += d0;
        r.array() -= d0;
        max_change = std::max(max_change, std::abs(d0));
      }
      max_outer_change = std::max(max_outer_change, max_change);
      if (max_change < inner_tol) {
        if (full_sweep) break;
        full_sweep = true;  // re-check the inactive coordinates
      } else {
        full_sweep = false;
      }
    }
    if (max_outer_change < outer_tol) break;
  }
}

LogisticModel destandardize(const Standardized& s, double lambda, double b0,
                            const Eigen::VectorXd& b) {
  const int p = static_cast<int>(b.size());
  LogisticModel model;
  model.l1_lambda = lambda;
  model.coef.resize(p);
  double intercept = b0;
  for (int j = 0; j < p; ++j) {
    model.coef(j) = s.constant[j] ? 0.0 : b(j) / s.sd(j);
    intercept -= model.coef(j) * s.mean(j);
  }
  model.intercept = intercept;
  return model;
}

double lambda_max_standardized(const Standardized& s,
                               const Eigen::Ref<const Eigen::VectorXi>& y) {
  const int n = static_cast<int>(s.xs.rows());
  const double ybar = y.cast<double>().mean();
  double best = 0.0;
  for (int j = 0; j < static_cast<int>(s.xs.cols()); ++j) {
    if (s.constant[j]) continue;
    const double g =
        std::abs((s.xs.col(j).array() * (y.cast<double>().array() - ybar))
                     .sum()) /
        static_cast<double>(n);
    best = std::max(best, g);
  }
  return best;
}

std::vector<double> lambda_grid(double top, int count, double ratio) {
  std::vector<double> grid(count);
  for (int k = 0; k < count; ++k) {
    grid[k] = top * std::pow(ratio, static_cast<double>(k) /
                                        static_cast<double>(count - 1));
  }
  return grid;
}

// Fits a decreasing lambda path with warm starts; returns standardized-scale
// parameters for each grid point.
void fit_l1_path_standardized(const Standardized& s,
                              const Eigen::Ref<const Eigen::VectorXi>& y,
                              const std::vector<double>& lambdas,
                              std::vector<double>& intercepts,
                              std::vector<Eigen::VectorXd>& coefs) {
  double b0 = logit(clipped_label_mean(y));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(s.xs.cols());
  intercepts.resize(lambdas.size());
  coefs.resize(lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    cd_fit_standardized(s, y, lambdas[k], b0, b);
    intercepts[k] = b0;
    coefs[k] = b;
  }
}

}  // namespace

double LogisticModel::predict_one(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return expit(intercept + coef.dot(x));
}

Eigen::VectorXd LogisticModel::predict(
    const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  Eigen::VectorXd eta = (x * coef).array() + intercept;
  for (int i = 0; i < eta.size(); ++i) eta(i) = expit(eta(i));
  return eta;
}

LogisticModel fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::VectorXi>& y,
                           LogisticOptions opts) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (y.size() != n || n == 0) {
    throw Error("fit_logistic: feature/label size mismatch");
  }

  // Constant labels: the caller-accepted intercept-only degenerate fit.
  if (y.minCoeff() == y.maxCoeff()) {
    LogisticModel model;
    model.intercept = logit(clipped_label_mean(y));
    model.coef = Eigen::VectorXd::Zero(p);
    return model;
  }

  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = x;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  theta(0) = logit(clipped_label_mean(y));

  Eigen::VectorXd eta(n), w(n), wz(n);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    eta = design * theta;
    for (int i = 0; i < n; ++i) {
      const double pi = expit(eta(i));
      // Working response kept in product form w*z = w*eta + (y - p); no
      // weight floor, so saturated points cannot stall a divergent fit
      // before the norm check fires. The ridge keeps the solve regular.
      w(i) = pi * (1.0 - pi);
      wz(i) = w(i) * eta(i) + (static_cast<double>(y(i)) - pi);
    }
    Eigen::MatrixXd normal = design.transpose() * w.asDiagonal() * design;
    // Ridge proportional to the Hessian scale: keeps collinear designs
    // solvable without creating a finite fixed point on separable data.
    normal.diagonal().array() +=
        kRidge * normal.diagonal().mean() + 1e-300;
    const Eigen::VectorXd rhs = design.transpose() * wz;
    const Eigen::VectorXd next = normal.ldlt().solve(rhs);

    if (!next.allFinite() || next.norm() > kDivergenceNorm) {
      throw SeparationDetected(
          "logistic fit diverged (perfect separation); use the L1 variant");
    }
    const double change = (next - theta).cwiseAbs().maxCoeff();
    theta = next;
    if (change < opts.tol) break;
  }

  LogisticModel model;
  model.intercept = theta(0);
  model.coef = theta.tail(p);
  return model;
}

LogisticModel fit_logistic_l1(const Eigen::Ref<const Eigen::MatrixXd>& x,
                              const Eigen::Ref<const Eigen::VectorXi>& y,
                              double lambda) {
  if (lambda < 0.0) throw Error("fit_logistic_l1: lambda must be >= 0");
  if (y.size() != x.rows() || x.rows() == 0) {
    throw Error("fit_logistic_l1: feature/label size mismatch");
  }
  if (y.minCoeff() == y.maxCoeff()) {
    LogisticModel model;
    model.intercept = logit(clipped_label_mean(y));
    model.coef = Eigen::VectorXd::Zero(x.cols());
    model.l1_lambda = lambda;
    return model;
  }
  const Standardized s = standardize(x);
  const double top = lambda_max_standardized(s, y);

  // Warm-started mini path down to the requested lambda; a cold start at a
  // small penalty converges slowly on correlated designs.
  std::vector<double> path;
  if (lambda < top) {
    const double floor = std::max(lambda, 1e-12);
    const int steps = 8;
    for (int k = 0; k <= steps; ++k) {
      path.push_back(top * std::pow(floor / top, static_cast<double>(k) /
                                                     static_cast<double>(steps)));
    }
    path.back() = lambda;
  } else {
    path.push_back(lambda);
  }

  std::vector<double> intercepts;
  std::vector<Eigen::VectorXd> coefs;
  fit_l1_path_standardized(s, y, path, intercepts, coefs);
  return destandardize(s, lambda, intercepts.back(), coefs.back());
}

double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x,
                  const Eigen::Ref<const Eigen::VectorXi>& y) {
  return lambda_max_standardized(standardize(x), y);
}

double mean_deviance(const Eigen::Ref<const Eigen::VectorXd>& p,
                     const Eigen::Ref<const Eigen::VectorXi>& y) {
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double pi = std::clamp(p(i), kPredictionClip, 1.0 - kPredictionClip);
    s += y(i) == 1 ? std::log(pi) : std::log(1.0 - pi);
  }
  return -2.0 * s / static_cast<double>(p.size());
}

double select_lambda_cv(const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXi>& y,
                        int folds, std::uint64_t seed) {
  const int n = static_cast<int>(x.rows());
  if (folds < 2) throw Error("select_lambda_cv: need at least 2 folds");
  if (n < folds) throw Error("select_lambda_cv: more folds than rows");

  // Global grid so that per-fold deviances are comparable.
  const double top = lambda_max(x, y);
  if (top <= 0.0) return 0.0;  // all features constant
  const int grid_size = 30;
  const std::vector<double> grid = lambda_grid(top, grid_size, 1e-3);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<double> total_dev(grid_size, 0.0);
  for (int k = 0; k < folds; ++k) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) {
      ((i % folds == k) ? test : train).push_back(order[i]);
    }
    Eigen::MatrixXd xtr(train.size(), x.cols()), xte(test.size(), x.cols());
    Eigen::VectorXi ytr(train.size()), yte(test.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      xtr.row(i) = x.row(train[i]);
      ytr(i) = y(train[i]);
    }
    for (std::size_t i = 0; i < test.size(); ++i) {
      xte.row(i) = x.row(test[i]);
      yte(i) = y(test[i]);
    }

    const Standardized s = standardize(xtr);
    std::vector<double> intercepts;
    std::vector<Eigen::VectorXd> coefs;
    fit_l1_path_standardized(s, ytr, grid, intercepts, coefs);
    for (int g = 0; g < grid_size; ++g) {
      const LogisticModel model =
          destandardize(s, grid[g], intercepts[g], coefs[g]);
      total_dev[g] +=
          mean_deviance(model.predict(xte), yte) * static_cast<double>(test.size());
    }
  }

  // Grid is sorted descending, so scanning with a strict comparison breaks
  // ties toward more shrinkage.
  int best = 0;
  for (int g = 1; g < grid_size; ++g) {
    if (total_dev[g] < total_dev[best]) best = g;
  }
  return grid[best];
}

}  // namespace fna
