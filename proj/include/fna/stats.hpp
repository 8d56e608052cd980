#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace fna {

// Numerically stable logistic function; exact 0/1 saturation is fine in
// double precision for |x| > ~37.
inline double expit(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

// Inverse standard normal CDF. Acklam's rational approximation followed by
// one Halley refinement; absolute error well below 1e-9 across (0,1).
double normal_quantile(double p);

// Two-sided critical value for a (1-c) confidence interval, c = 1 - level.
inline double z_critical(double level) {
  return normal_quantile(0.5 * (1.0 + level));
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Sample variance, caller picks the divisor (n for plug-in influence-function
// variance, n-1 for Monte Carlo summaries).
inline double variance_of(const std::vector<double>& v, double divisor) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return divisor > 0.0 ? s / divisor : 0.0;
}

// Type-7 (linear interpolation) empirical quantile of an unsorted sample.
double sample_quantile(std::vector<double> values, double q);

// Gauss-Hermite rule adapted to a standard normal weight: E[f(U)] for
// U ~ N(0,1) is approximated by sum(weights[k] * f(nodes[k])); the weights
// sum to one. Nodes/weights come from the Golub-Welsch eigen decomposition.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussHermite(int n);

  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      s += weights[k] * f(nodes[k]);
    }
    return s;
  }
};

}  // namespace fna
