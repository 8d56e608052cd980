// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavy Monte Carlo criteria run multi-threaded but are
// deterministic for their fixed seeds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "fna/bounds.hpp"
#include "fna/crossfit.hpp"
#include "fna/csv.hpp"
#include "fna/estimators.hpp"
#include "fna/joint.hpp"
#include "fna/parallel.hpp"
#include "fna/rng.hpp"
#include "fna/simulation.hpp"
#include "fna/stats.hpp"

using namespace fna;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, bool pass, const std::string& what, double secs) {
  std::printf("%s criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL",
              criterion, what.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void note(const std::string& text) { g_notes.push_back(text); }

struct GridCase {
  MarginalPair m;
  RhoInterval ri;  // subinterval of the feasible range
};

// Shared random grid: interior marginal pairs with feasible subintervals.
std::vector<GridCase> make_grid(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GridCase> grid;
  grid.reserve(count);
  while (static_cast<int>(grid.size()) < count) {
    const MarginalPair m{0.01 + 0.98 * rng.uniform(),
                         0.01 + 0.98 * rng.uniform()};
    const RhoInterval feasible = rho_feasible_range(m);
    const double span = feasible.rho_u - feasible.rho_l;
    double a = feasible.rho_l + span * rng.uniform();
    double b = feasible.rho_l + span * rng.uniform();
    if (a > b) std::swap(a, b);
    grid.push_back({m, {a, b}});
  }
  return grid;
}

void criterion_1_and_2(const std::vector<GridCase>& grid) {
  Timer timer;
  bool eq_ok = true, inside_ok = true, witness_ok = true;
  const int scan = 10000;  // contract: 1e-10 endpoint agreement at this size
  for (const GridCase& c : grid) {
    const BoundPair gb = general_bounds(c.m, c.ri);
    const ExtremeFna ex = extremize_fna(c.m, c.ri, scan);
    if (std::abs(ex.min_fna - gb.lower) > 1e-10 ||
        std::abs(ex.max_fna - gb.upper) > 1e-10) {
      eq_ok = false;
    }
    // The scan extremes bracket every visited joint, so min/max inside the
    // bounds puts the whole grid inside; spot-check a coarser sweep too.
    if (ex.min_fna < gb.lower - 1e-10 || ex.max_fna > gb.upper + 1e-10) {
      inside_ok = false;
    }
    for (int k = 0; k < 101; ++k) {
      const double rho =
          c.ri.rho_l + (c.ri.rho_u - c.ri.rho_l) * k / 100.0;
      const double pi10 = joint_from_rho(c.m, rho).pi10;
      if (pi10 < gb.lower - 1e-10 || pi10 > gb.upper + 1e-10) {
        inside_ok = false;
      }
    }
    // Sharpness witnesses at the interval endpoints.
    const JointTable at_u = joint_from_rho(c.m, c.ri.rho_u);
    const JointTable at_l = joint_from_rho(c.m, c.ri.rho_l);
    if (std::abs(at_u.pi10 - gb.lower) > 1e-12 ||
        std::abs(at_l.pi10 - gb.upper) > 1e-12) {
      witness_ok = false;
    }
  }
  const double secs = timer.seconds();
  report(1, eq_ok && inside_ok && secs < 10.0,
         "oracle equivalence of general_bounds on 10^4 random pairs", secs);
  report(2, witness_ok, "sharpness witnesses attain the bounds at 1e-12",
         timer.seconds() - secs);
}

void criterion_3() {
  Timer timer;
  bool ok = true;
  const MarginalPair toy{0.690, 0.842};
  const BoundPair fh = fh_bounds(toy);
  ok &= std::abs(fh.lower - 0.0) < 5e-4;
  ok &= std::abs(fh.upper - 0.158) < 5e-4;
  ok &= std::abs(toy.mu0 * (1 - toy.mu1) - 0.109) < 5e-4;
  ok &= std::abs(sd_product(toy) - 0.169) < 5e-4;
  ok &= std::abs(rho_star_threshold({0.25, 0.5}) - 0.577) < 5e-4;
  ok &= std::abs(rho_star_from_odds_ratio(1.01) - 0.995) < 5e-4;
  ok &= std::abs(rho_star_from_odds_ratio(10000.0) - 0.01) < 5e-4;
  report(3, ok, "benchmark point values to three decimals", timer.seconds());
}

// expit(a + x) + expit(a - x) computed with a single exponential:
// with T = e^-a and H = 2 cosh(x), the pair sum is (2 + TH)/(1 + TH + T^2).
double expit_pair(double exp_neg_a, double two_cosh_x) {
  const double th = exp_neg_a * two_cosh_x;
  return (2.0 + th) / (1.0 + th + exp_neg_a * exp_neg_a);
}

void criterion_4() {
  Timer timer;
  const DgpSpec spec = DgpSpec::by_name("C1");
  const int n = 200000;
  const int inner = 10000;
  const std::vector<double> rhos{0.0, 0.2, 0.4};

  // Observed sample.
  const Generated gen = generate(spec, n, 44001);

  // The pair-sum identity must match direct evaluation before we lean on it.
  {
    Rng check(424);
    for (int k = 0; k < 200; ++k) {
      const double a = 4.0 * (check.uniform() - 0.5);
      const double x = 3.0 * check.normal();
      const double direct = expit(a + x) + expit(a - x);
      const double fast = expit_pair(std::exp(-a), 2.0 * std::cosh(x));
      if (std::abs(direct - fast) > 1e-12) {
        report(4, false, "expit pair identity self-check failed", 0.0);
        return;
      }
    }
  }

  // Analytic eta at each unit: propensity exact, outcome means by an inner
  // Monte Carlo of size 10^4 per covariate point (antithetic +-u pairs).
  // C1 loads U with 3 and 1.5, so e^{-3u} is the square of e^{-1.5u} and
  // each draw costs one exponential.
  Eigen::VectorXd mu0_mc(n), mu1_mc(n);
  const int block = 2048;
  const int blocks = (n + block - 1) / block;
  parallel_for(0, blocks, [&](int b) {
    Rng rng(derive_seed(44002, b));
    const int lo = b * block, hi = std::min(n, lo + block);
    for (int i = lo; i < hi; ++i) {
      const double lin = spec.outcome_coef.dot(gen.data.x.row(i));
      const double t0 = std::exp(-(spec.intercept0 + lin));
      const double t1 = std::exp(-(spec.intercept1 + lin));
      double s0 = 0.0, s1 = 0.0;
      for (int k = 0; k < inner / 2; ++k) {
        const double u = rng.normal();
        const double e1 = std::exp(-1.5 * u);
        const double e0 = e1 * e1;
        s0 += expit_pair(t0, e0 + 1.0 / e0);
        s1 += expit_pair(t1, e1 + 1.0 / e1);
      }
      mu0_mc(i) = s0 / inner;
      mu1_mc(i) = s1 / inner;
    }
  });

  const std::vector<double> beta_true =
      true_beta_multi(spec, rhos, 200000, 1000, 44003);

  bool ok = true;
  std::string detail;
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    const double rho = rhos[r];
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const Preds preds{gen.latent.e_true(i), mu0_mc(i), mu1_mc(i)};
      const double v = phi_beta(gen.data.y(i), gen.data.a(i), preds) -
                       rho * phi_gamma(gen.data.y(i), gen.data.a(i), preds);
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    const double err = std::abs(mean - beta_true[r]);
    if (err >= 4.0 * se) ok = false;
    char buf[120];
    std::snprintf(buf, sizeof(buf), " rho=%.1f: |err|=%.2e (4se=%.2e)", rho,
                  err, 4.0 * se);
    detail += buf;
  }
  const double secs = timer.seconds();
  report(4, ok && secs < 60.0, "EIF mean identities under C1 truth" + detail,
         secs);
}

void criterion_5() {
  Timer timer;
  const DgpSpec spec = DgpSpec::by_name("C1");
  StudyOptions opts;
  const std::vector<double> rhos{0.0, 0.2, 0.4};
  const auto rows = run_study(spec, 1000, rhos, 500, opts, 55001);
  bool ok = true;
  std::string detail;
  for (const MetricsRow& r : rows) {
    const double ratio = r.ese / r.sd;
    const bool row_ok = std::abs(r.bias) <= 0.006 && r.cp95 >= 0.915 &&
                        r.cp95 <= 0.975 && std::abs(ratio - 1.0) <= 0.15;
    ok &= row_ok;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  " rho=%.1f: bias=%+.4f cp95=%.3f ese/sd=%.3f%s", r.rho,
                  r.bias, r.cp95, ratio, row_ok ? "" : " <-");
    detail += buf;
  }
  const double secs = timer.seconds();
  if (secs >= 300.0) note("criterion 5 exceeded its 5-minute runtime target");
  report(5, ok, "C1 table reproduction at desk scale" + detail, secs);
}

void criterion_6() {
  Timer timer;
  bool ok = true;
  std::string detail;
  const double fna_expected[3] = {0.0775, 0.0934, 0.1127};
  const char* ids[3] = {"C1", "C2", "C3"};
  for (int c = 0; c < 3; ++c) {
    const Generated gen =
        generate(DgpSpec::by_name(ids[c]), 1000000, 66001 + c);
    double fna = 0.0;
    for (int i = 0; i < gen.data.n(); ++i) {
      fna += gen.latent.y0(i) == 1 && gen.latent.y1(i) == 0 ? 1.0 : 0.0;
    }
    fna /= gen.data.n();
    const bool case_ok = std::abs(fna - fna_expected[c]) <= 0.003;
    ok &= case_ok;
    char buf[80];
    std::snprintf(buf, sizeof(buf), " %s: fna=%.4f%s", ids[c], fna,
                  case_ok ? "" : " <-");
    detail += buf;
  }

  const auto c1 = true_beta_multi(DgpSpec::by_name("C1"), {0.0, 0.2, 0.4},
                                  100000, 1000, 66010);
  const double c1_expected[3] = {0.160, 0.115, 0.069};
  for (int k = 0; k < 3; ++k) {
    const bool beta_ok = std::abs(c1[k] - c1_expected[k]) <= 0.004;
    ok &= beta_ok;
    char buf[80];
    std::snprintf(buf, sizeof(buf), " beta(%.1f)=%.4f%s", 0.2 * k, c1[k],
                  beta_ok ? "" : " <-");
    detail += buf;
  }
  const double c2 = true_beta(DgpSpec::by_name("C2"), 0.0, 100000, 1000, 66011);
  const double c3 = true_beta(DgpSpec::by_name("C3"), 0.4, 100000, 1000, 66012);
  ok &= std::abs(c2 - 0.145) <= 0.004;
  ok &= std::abs(c3 - 0.047) <= 0.004;

  report(6, ok, "DGP truth: empirical FNA and true_beta columns" + detail,
         timer.seconds());
}

void criterion_7() {
  Timer timer;
  const DgpSpec spec = DgpSpec::by_name("C6");
  StudyOptions opts;
  opts.model = ModelSpec::kL1Cv;
  const auto rows = run_study(spec, 2000, {0.3}, 200, opts, 77001);
  const MetricsRow& r = rows[0];
  const bool ok = std::abs(r.bias) <= 0.008 && r.cp95 >= 0.90;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "C6 (p=100) with L1-CV nuisances: bias=%+.4f cp95=%.3f "
                "beta_true=%.4f",
                r.bias, r.cp95, r.beta_true);
  const double secs = timer.seconds();
  if (secs >= 900.0) note("criterion 7 exceeded its 15-minute runtime target");
  report(7, ok, buf, secs);
}

void criterion_8(const std::vector<GridCase>& grid) {
  Timer timer;
  bool ok = true;
  for (const GridCase& c : grid) {
    const MarginalPair& m = c.m;
    const RhoInterval& ri = c.ri;
    const BoundPair sb = sensitivity_bounds(m, ri);
    const BoundPair fh = fh_bounds(m);

    // Nesting inside the Frechet-Hoeffding envelope.
    ok &= sb.lower >= fh.lower - 1e-12 && sb.upper <= fh.upper + 1e-12;

    // Monotonicity in both endpoints.
    const RhoInterval feasible = rho_feasible_range(m);
    const BoundPair wider =
        sensitivity_bounds(m, {ri.rho_l, feasible.rho_u});
    const BoundPair higher =
        sensitivity_bounds(m, {0.5 * (ri.rho_l + ri.rho_u), ri.rho_u});
    ok &= wider.lower <= sb.lower + 1e-12;
    ok &= higher.upper <= sb.upper + 1e-12;

    // Collapse at a point interval.
    const BoundPair point = sensitivity_bounds(m, {ri.rho_u, ri.rho_u});
    ok &= std::abs(point.upper - point.lower) < 1e-12;

    // Factored lower bound (positive rho_u only) and the harm criterion.
    if (ri.rho_u >= 0.0) {
      const LowerBoundParts parts = lower_bound_decomposed(m, ri.rho_u);
      const double direct = std::max(
          m.mu0 * (1 - m.mu1) - ri.rho_u * sd_product(m), 0.0);
      ok &= std::abs(parts.value - direct) < 1e-12;
      ok &= parts.harmful_best_case ==
            (tau(m) < (1 - ri.rho_u * ri.rho_u) * (1 - m.mu0) * m.mu1);
    }

    // Upper-bound caps.
    const UpperBoundCaps caps = upper_bound_caps(m);
    ok &= caps.fh_cap >= fh.upper - 1e-12;
    ok &= caps.indep_cap >= m.mu0 * (1 - m.mu1) - 1e-12;
  }

  // Determinism of seeded runs.
  StudyOptions opts;
  opts.n_outer_truth = 2000;
  opts.n_inner_truth = 200;
  const DgpSpec spec = DgpSpec::by_name("C2");
  const auto a = run_study(spec, 250, {0.0, 0.3}, 6, opts, 88001);
  const auto b = run_study(spec, 250, {0.0, 0.3}, 6, opts, 88001);
  for (std::size_t k = 0; k < a.size(); ++k) {
    ok &= a[k].bias == b[k].bias && a[k].sd == b[k].sd &&
          a[k].ese == b[k].ese && a[k].cp95 == b[k].cp95;
  }

  report(8, ok, "property suite on the shared random grid", timer.seconds());
}

void criterion_9() {
  Timer timer;
  const char* env = std::getenv("FNA_RHC_CSV");
  const std::string path = env != nullptr ? env : "data/rhc.csv";
  FILE* probe = std::fopen(path.c_str(), "r");
  if (probe == nullptr) {
    std::printf(
        "SKIP criterion 9: right-heart-catheterization replication "
        "(no dataset at %s; set FNA_RHC_CSV)\n",
        path.c_str());
    return;
  }
  std::fclose(probe);

  const Dataset data = load_csv(path);
  CrossFitOptions cf;
  const NuisanceFit fit = cross_fit(data, cf, 99001);

  bool ok = true;
  std::string detail;
  const EstimateReport ate = dr_ate(data, fit);
  ok &= std::abs(ate.estimate - (-0.055)) <= 0.01;
  ok &= std::abs(ate.se - 0.013) <= 0.003;

  std::vector<double> grid;
  for (int k = 0; k <= 30; ++k) grid.push_back(0.01 * k);
  const CurveReport curve = sensitivity_curve(data, fit, grid);
  ok &= std::abs(curve.estimates.back() - 0.152) <= 0.015;
  ok &= std::abs(curve.estimates.front() - 0.207) <= 0.015;
  ok &= std::abs(curve.fh_lower - 0.074) <= 0.015;
  ok &= std::abs(curve.fh_upper - 0.290) <= 0.015;

  const RhoSelection sel = rho_upper_selection(fit);
  int covered = 0;
  for (double u : sel.per_unit_upper) {
    if (u <= 0.30 + 1e-12) ++covered;
  }
  const double coverage = double(covered) / sel.per_unit_upper.size();
  ok &= std::abs(coverage - 0.988) <= 0.01;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "RHC replication: ate=%+.3f(se %.3f) curve=[%.3f,%.3f] "
                "fh=[%.3f,%.3f] cover=%.3f",
                ate.estimate, ate.se, curve.estimates.back(),
                curve.estimates.front(), curve.fh_lower, curve.fh_upper,
                coverage);
  report(9, ok, buf, timer.seconds());
}

}  // namespace

int main() {
  const Timer total;
  const std::vector<GridCase> grid = make_grid(10000, 11001);

  criterion_1_and_2(grid);
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8(grid);
  criterion_9();

  for (const std::string& n : g_notes) std::printf("NOTE: %s\n", n.c_str());
  std::printf("%s (%d failure%s, %.0fs total)\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures, g_failures == 1 ? "" : "s", total.seconds());
  return g_failures == 0 ? 0 : 1;
}
