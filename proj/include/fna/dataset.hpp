#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fna {

// Observed sample: covariates X (n x p), binary treatment a and outcome y.
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXi a;
  Eigen::VectorXi y;
  std::vector<std::string> covariate_names;  // defaults to x1..xp

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }
};

// Throws InvalidDataset unless n >= 1, p >= 1, a/y are 0/1 vectors of
// length n, and both treatment arms are nonempty.
void validate(const Dataset& d);

std::vector<std::string> default_covariate_names(int p);

}  // namespace fna
