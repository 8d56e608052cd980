#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fna/errors.hpp"
#include "fna/logistic.hpp"
#include "fna/rng.hpp"
#include "fna/stats.hpp"

using namespace fna;

namespace {

struct Sim {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
};

Sim simulate_logistic(int n, const Eigen::VectorXd& slopes, double intercept,
                      std::uint64_t seed) {
  Rng rng(seed);
  Sim s;
  s.x.resize(n, slopes.size());
  s.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < slopes.size(); ++j) s.x(i, j) = rng.normal();
    s.y(i) = rng.bernoulli(expit(intercept + s.x.row(i).dot(slopes))) ? 1 : 0;
  }
  return s;
}

}  // namespace

TEST_CASE("fit_logistic: balanced labels with a zero-variance feature") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(8, 1);
  Eigen::VectorXi y(8);
  y << 0, 1, 0, 1, 0, 1, 0, 1;
  const LogisticModel m = fit_logistic(x, y);
  CHECK(m.intercept == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(m.coef(0) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("fit_logistic: recovers the generating slope at n = 1e5") {
  Eigen::VectorXd slopes(1);
  slopes << 1.0;
  const Sim s = simulate_logistic(100000, slopes, 0.0, 2024);
  const LogisticModel m = fit_logistic(s.x, s.y);
  CHECK(std::abs(m.coef(0) - 1.0) < 0.03);
  CHECK(std::abs(m.intercept) < 0.03);
}

TEST_CASE("fit_logistic: mean score vanishes at the optimum") {
  Eigen::VectorXd slopes(3);
  slopes << 0.5, -0.3, 0.2;
  const Sim s = simulate_logistic(5000, slopes, 0.4, 99);
  const LogisticModel m = fit_logistic(s.x, s.y);
  const Eigen::VectorXd p = m.predict(s.x);
  const Eigen::VectorXd resid = s.y.cast<double>() - p;
  const double n = static_cast<double>(s.x.rows());
  CHECK(std::abs(resid.sum() / n) < 1e-6);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(s.x.col(j).dot(resid) / n) < 1e-6);
  }
}

TEST_CASE("fit_logistic: perfect separation is detected") {
  Eigen::MatrixXd x(6, 1);
  x << -3, -2, -1, 1, 2, 3;
  Eigen::VectorXi y(6);
  y << 0, 0, 0, 1, 1, 1;
  CHECK_THROWS_AS(fit_logistic(x, y), SeparationDetected);
}

TEST_CASE("fit_logistic: constant labels give the intercept-only fit") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  Eigen::VectorXi y = Eigen::VectorXi::Ones(4);
  const LogisticModel m = fit_logistic(x, y);
  CHECK(m.coef.norm() == 0.0);
  CHECK(m.predict_one(x.row(0)) > 0.999);
}

TEST_CASE("fit_logistic_l1: full shrinkage at huge lambda") {
  Eigen::VectorXd slopes(4);
  slopes << 1.0, -0.5, 0.25, 0.0;
  const Sim s = simulate_logistic(500, slopes, -0.3, 7);
  const LogisticModel m = fit_logistic_l1(s.x, s.y, 10.0);
  CHECK(m.coef.cwiseAbs().maxCoeff() == 0.0);
  const double ybar = s.y.cast<double>().mean();
  CHECK(m.intercept == doctest::Approx(logit(ybar)).epsilon(1e-6));
}

TEST_CASE("fit_logistic_l1: lambda = 0 matches the unpenalized fit") {
  Eigen::VectorXd slopes(3);
  slopes << 0.5, -0.3, 0.2;
  const Sim s = simulate_logistic(2000, slopes, 0.1, 12);
  const LogisticModel mle = fit_logistic(s.x, s.y);
  const LogisticModel cd = fit_logistic_l1(s.x, s.y, 0.0);
  CHECK(std::abs(cd.intercept - mle.intercept) < 1e-4);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(cd.coef(j) - mle.coef(j)) < 1e-4);
  }
}

TEST_CASE("fit_logistic_l1: geometric-decay signal concentrates the support") {
  // Covariate relevance decays as 1/2^j; at a CV-scale penalty the leading
  // features should carry essentially all of the fitted weight.
  const int p = 20;
  Eigen::VectorXd slopes(p);
  for (int j = 0; j < p; ++j) slopes(j) = std::pow(0.5, j);
  const Sim s = simulate_logistic(2000, slopes, 0.0, 31);
  const double lambda = select_lambda_cv(s.x, s.y, 5, 17);
  const LogisticModel m = fit_logistic_l1(s.x, s.y, lambda);
  const double head = m.coef.head(3).cwiseAbs().sum();
  const double tail = m.coef.tail(10).cwiseAbs().sum();
  CHECK(m.coef(0) != 0.0);
  CHECK(head > 5.0 * tail);
}

TEST_CASE("select_lambda_cv: pure noise picks the top of the grid") {
  Rng rng(558);
  Eigen::MatrixXd x(400, 5);
  Eigen::VectorXi y(400);
  for (int i = 0; i < 400; ++i) {
    for (int j = 0; j < 5; ++j) x(i, j) = rng.normal();
    y(i) = rng.bernoulli(0.5) ? 1 : 0;
  }
  const double lambda = select_lambda_cv(x, y, 5, 99);
  CHECK(lambda == doctest::Approx(lambda_max(x, y)).epsilon(1e-12));
}

TEST_CASE("select_lambda_cv: strong signal picks a small lambda") {
  Eigen::VectorXd slopes(1);
  slopes << 2.0;
  const Sim s = simulate_logistic(1000, slopes, 0.0, 44);
  const double lambda = select_lambda_cv(s.x, s.y, 5, 44);
  const double top = lambda_max(s.x, s.y);
  const double grid_median = top * std::pow(1e-3, 0.5);
  CHECK(lambda < grid_median);
}

TEST_CASE("select_lambda_cv: deterministic for a fixed seed") {
  Eigen::VectorXd slopes(2);
  slopes << 0.8, -0.4;
  const Sim s = simulate_logistic(600, slopes, 0.2, 8);
  const double l1 = select_lambda_cv(s.x, s.y, 5, 12345);
  const double l2 = select_lambda_cv(s.x, s.y, 5, 12345);
  CHECK(l1 == l2);
}
