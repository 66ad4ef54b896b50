#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hdim/generate.hpp"
#include "hdim/verify.hpp"

using namespace hdim;

TEST_CASE("log_plus floors its argument at e") {
  CHECK(log_plus(0.0) == 1.0);
  CHECK(log_plus(1.0) == 1.0);
  CHECK(log_plus(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(log_plus(std::exp(2.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(log_plus(100.0) == doctest::Approx(std::log(100.0)).epsilon(1e-15));
}

TEST_CASE("normal_cdf hits tabulated values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-10));
}

TEST_CASE("KS distances behave on constructed samples") {
  // The stairstep-optimal sample {(i+1/2)/n} sits 1/(2n) from uniform.
  std::vector<double> grid;
  const int n = 50;
  for (int i = 0; i < n; ++i) grid.push_back((i + 0.5) / n);
  CHECK(ks_to_uniform(grid) == doctest::Approx(0.01).epsilon(1e-12));

  std::vector<double> atom(10, 0.5);
  CHECK(ks_to_uniform(atom) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS(ks_to_uniform({}));
}

TEST_CASE("quadrature integrates smooth functions to tolerance") {
  const double third =
      adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(third == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const double two = adaptive_simpson([](double x) { return std::sin(x); },
                                      0.0, std::numbers::pi, 1e-12);
  CHECK(two == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("moment constants match closed forms") {
  // r = 1: M^2 = c Gamma(3) / k^2 = 2 with c = k = 1.
  CHECK(moment_constant(ExponentialPowerTail{1.0, 1.0, 1.0}) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  // r = 2: M^2 = c Gamma(2) / k.
  CHECK(moment_constant(ExponentialPowerTail{2.0, 1.0, 1.0}) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(moment_constant(ExponentialPowerTail{2.0, 4.0, 1.0}) ==
        doctest::Approx(0.5).epsilon(1e-9));
  // General r through the gamma function.
  const double want =
      std::sqrt(std::tgamma(2.0 / 1.5 + 1.0) / std::pow(2.0, 2.0 / 1.5));
  CHECK(moment_constant(ExponentialPowerTail{1.5, 2.0, 1.0}) ==
        doctest::Approx(want).epsilon(1e-9));
  // Degenerate tail: all mass at zero.
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(moment_constant(ExponentialPowerTail{2.0, inf, 1.0}) == 0.0);
  // Polynomial: M^2 = 2 c / ((k-1)(k-2)).
  CHECK(moment_constant(PolynomialTail{4.0, 1.0}) ==
        doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-9));
  CHECK(moment_constant(PolynomialTail{3.0, 2.0}) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK_THROWS(moment_constant(PolynomialTail{2.0, 1.0}));
  CHECK_THROWS(moment_constant(TailFamily{BoundedTail{-1.0, 1.0}}));
}

TEST_CASE("moment constants agree with numeric survival integrals") {
  // M^2 = int_0^inf 2 c s g(s) ds where g is the survival envelope at s.
  // Integrate [0, 128] in dyadic panels so the quadrature probes sample
  // every scale (a single wide panel can step over a narrow bump and
  // accept zero); for polynomial tails add the exact remainder beyond the
  // cutoff (exponential remainders are below 1e-50 for these parameters).
  const auto head_integral = [](const std::function<double(double)>& f) {
    double total = adaptive_simpson(f, 0.0, 1.0, 1e-13);
    for (double a = 1.0; a < 128.0; a *= 2.0) {
      total += adaptive_simpson(f, a, 2.0 * a, 1e-13);
    }
    return total;
  };
  const auto ep_m2 = [&head_integral](double r, double k, double c) {
    return head_integral([r, k, c](double s) {
      return 2.0 * c * s * std::exp(-k * std::pow(s, r));
    });
  };
  const auto poly_m2 = [&head_integral](double k, double c) {
    const double head = head_integral(
        [k, c](double s) { return 2.0 * c * s * std::pow(1.0 + s, -k); });
    const double w = 129.0;
    const double tail = 2.0 * c * (std::pow(w, 2.0 - k) / (k - 2.0) -
                                   std::pow(w, 1.0 - k) / (k - 1.0));
    return head + tail;
  };
  CHECK(moment_constant(ExponentialPowerTail{1.0, 1.0, 1.0}) ==
        doctest::Approx(std::sqrt(ep_m2(1.0, 1.0, 1.0))).epsilon(1e-10));
  CHECK(moment_constant(ExponentialPowerTail{1.5, 2.0, 0.5}) ==
        doctest::Approx(std::sqrt(ep_m2(1.5, 2.0, 0.5))).epsilon(1e-10));
  CHECK(moment_constant(ExponentialPowerTail{2.0, 3.0, 2.0}) ==
        doctest::Approx(std::sqrt(ep_m2(2.0, 3.0, 2.0))).epsilon(1e-10));
  CHECK(moment_constant(PolynomialTail{3.0, 2.0}) ==
        doctest::Approx(std::sqrt(poly_m2(3.0, 2.0))).epsilon(1e-10));
  CHECK(moment_constant(PolynomialTail{4.5, 1.0}) ==
        doctest::Approx(std::sqrt(poly_m2(4.5, 1.0))).epsilon(1e-10));
}

TEST_CASE("two-point interval sums are enumerated exactly") {
  HoeffdingConfig cfg;
  cfg.a = -1.0;
  cfg.b = 1.0;
  cfg.n = 2;
  cfg.two_point = true;
  cfg.grid = {0.0, 0.5, 1.0};
  const BoundReport r = verify_hoeffding(cfg);
  REQUIRE(r.points.size() == 3);
  CHECK(r.points[0].exact);
  CHECK(r.points[0].std_error == 0.0);
  // |X1 + X2| / 2 over the four sign patterns: values {1, 0, 0, 1}.
  CHECK(r.points[0].empirical == 1.0);
  CHECK(r.points[1].empirical == 0.5);
  CHECK(r.points[2].empirical == 0.5);
  CHECK(r.points[1].bound ==
        doctest::Approx(2.0 * std::exp(-2.0 * 0.25 / 8.0)).epsilon(1e-14));
  CHECK(r.all_hold);
}

TEST_CASE("the interval bound fails when artificially scaled down") {
  HoeffdingConfig cfg;
  cfg.n = 4;
  cfg.two_point = true;
  cfg.grid = {0.5};
  cfg.bound_scale = 1e-6;
  const BoundReport r = verify_hoeffding(cfg);
  CHECK_FALSE(r.all_hold);
  CHECK_FALSE(r.points[0].holds);
}

TEST_CASE("sampled interval bounds hold with Monte Carlo error bars") {
  HoeffdingConfig cfg;
  cfg.a = 0.0;
  cfg.b = 3.0;
  cfg.n = 20;
  cfg.two_point = false;
  cfg.grid = {0.3, 0.6, 0.9};
  cfg.trials = 20000;
  cfg.seed = 5;
  const BoundReport r = verify_hoeffding(cfg);
  CHECK(r.all_hold);
  for (const GridPoint& pt : r.points) {
    CHECK_FALSE(pt.exact);
    CHECK(pt.empirical >= 0.0);
    CHECK(pt.empirical <= 1.0);
    CHECK(pt.bound > 0.0);
  }
  CHECK(r.points[0].empirical > r.points[2].empirical);
}

TEST_CASE("the quadratic-exponent sum bound requires r = 2 and holds") {
  SubgaussianSumConfig cfg;
  cfg.tail = ExponentialPowerTail{2.0, 1.0, 2.0};
  cfg.n = 15;
  cfg.grid = {0.5, 1.0, 2.0};
  cfg.trials = 20000;
  cfg.seed = 6;
  const BoundReport r = verify_subgaussian_sum(cfg);
  CHECK(r.all_hold);
  CHECK(r.points[0].bound ==
        doctest::Approx(2.0 * std::exp(-15.0 * 0.25 / 32.0)).epsilon(1e-12));

  SubgaussianSumConfig bad = cfg;
  bad.tail = ExponentialPowerTail{1.0, 1.0, 2.0};
  CHECK_THROWS(verify_subgaussian_sum(bad));
}

TEST_CASE("symmetrized bounds skip grid points below their validity line") {
  SymmetrizedConfig cfg;
  cfg.tail = ExponentialPowerTail{1.0, 1.0, 1.0};
  cfg.n = 4;
  cfg.bound = SymmetrizedBound::kExpS;
  cfg.s = 2.0;
  // Validity needs x >= sqrt(8) M / sqrt(n) = sqrt(2) * M ~ 2.0.
  cfg.grid = {0.5, 4.0};
  cfg.trials = 4000;
  cfg.seed = 7;
  const BoundReport r = verify_symmetrized_bounds(cfg);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].skipped);
  CHECK_FALSE(r.points[1].skipped);
  CHECK(r.all_hold);  // over the single in-range point
}

TEST_CASE("symmetrized bound formulas are reproduced at a fixed point") {
  const double n = 50.0, x = 1.2, s = 2.0, c = 1.0, k = 1.0, r = 1.0;
  SymmetrizedConfig cfg;
  cfg.tail = ExponentialPowerTail{r, k, c};
  cfg.n = static_cast<int>(n);
  cfg.s = s;
  cfg.grid = {x};
  cfg.trials = 1000;

  cfg.bound = SymmetrizedBound::kExpS;
  const double plain = verify_symmetrized_bounds(cfg).points[0].bound;
  CHECK(plain == doctest::Approx(4.0 * std::exp(-n * x * x / (32.0 * s * s)) +
                                 4.0 * c * n * std::exp(-k * s / 2.0))
                     .epsilon(1e-12));

  cfg.bound = SymmetrizedBound::kExpSharp;
  const double sharp = verify_symmetrized_bounds(cfg).points[0].bound;
  CHECK(sharp ==
        doctest::Approx(4.0 * std::exp(-n * k * x * x / (128.0 * c * s * s)) +
                        4.0 * c * n * std::exp(-k * s / 2.0))
            .epsilon(1e-12));

  SymmetrizedConfig pcfg;
  pcfg.tail = PolynomialTail{4.0, 1.0};
  pcfg.n = 50;
  pcfg.s = 3.0;
  pcfg.grid = {2.0};
  pcfg.trials = 1000;
  pcfg.bound = SymmetrizedBound::kPoly;
  const double poly = verify_symmetrized_bounds(pcfg).points[0].bound;
  CHECK(poly ==
        doctest::Approx(4.0 * std::exp(-50.0 * 4.0 / (32.0 * 9.0)) +
                        std::pow(2.0, 6.0) * 50.0 / std::pow(5.0, 4.0))
            .epsilon(1e-12));

  // Kind/family mismatches are configuration errors.
  SymmetrizedConfig wrong = cfg;
  wrong.tail = PolynomialTail{4.0, 1.0};
  wrong.bound = SymmetrizedBound::kExpS;
  CHECK_THROWS(verify_symmetrized_bounds(wrong));
  SymmetrizedConfig wrong2 = pcfg;
  wrong2.tail = ExponentialPowerTail{1.0, 1.0, 1.0};
  wrong2.bound = SymmetrizedBound::kPoly;
  CHECK_THROWS(verify_symmetrized_bounds(wrong2));
}

TEST_CASE("rate constants are pinned to the tail parameters") {
  const RateParams ep = RateParams::exponential(1.0, 1.0, 2.0, 20.0, 3.0, 1.0);
  CHECK(ep.theta1 == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK(ep.c2 == doctest::Approx(1.0 / 128.0).epsilon(1e-15));
  CHECK(ep.M > 0.0);
  CHECK(ep.a_n(1) == doctest::Approx(std::sqrt(std::log(4.0))).epsilon(1e-12));

  // c1 must exceed 2 / k^{1/r}.
  CHECK_THROWS(RateParams::exponential(1.0, 1.0, 2.0, 20.0, 1.9, 1.0));
  CHECK_THROWS(RateParams::exponential(0.5, 1.0, 2.0, 20.0, 3.0, 1.0));

  const RateParams poly = RateParams::polynomial(1.0, 6.0, 0.1, 1.0, 9.0);
  CHECK(poly.k == 6.0);
  CHECK(poly.beta == 0.1);
  CHECK_THROWS(RateParams::polynomial(1.0, 6.0, 0.05, 1.0, 9.0));  // k beta
  CHECK_THROWS(RateParams::polynomial(1.0, 6.0, 0.1, 1.0, 7.0));   // b <= 8
  CHECK_THROWS(RateParams::polynomial(1.0, 2.0, 0.5, 1.0, 9.0));   // k <= 2
}

TEST_CASE("a small rate sweep runs and the failure hook inverts the trend") {
  RateSweepConfig cfg;
  cfg.n_sweep = {10, 20};
  cfg.tail = ExponentialPowerTail{2.0, 1.0, 1.0};
  cfg.row_law = PowerOfNRows{1.0};
  cfg.params = RateParams::exponential(1.0, 1.0, 2.0, 20.0, 3.0, 1.0);
  cfg.trials = 100;
  cfg.seed = 11;
  const RateReport r = verify_rate_thm22(cfg);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].n == 10);
  CHECK(r.points[1].n == 20);
  CHECK(r.points[0].envelope > 0.0);
  CHECK(r.points[0].mean_max_rows == 10.0);  // ceil(n^1) rows, deterministic
  CHECK(r.trend_pass);
  CHECK(r.tail_sum == 0.0);

  RateSweepConfig broken = cfg;
  broken.envelope_scale = 1e-6;
  const RateReport rb = verify_rate_thm22(broken);
  CHECK_FALSE(rb.trend_pass);
  CHECK(rb.points.back().exceedance == 1.0);
}

TEST_CASE("rate sweeps validate their tail/envelope pairing") {
  RateSweepConfig cfg;
  cfg.n_sweep = {10};
  cfg.tail = ExponentialPowerTail{1.0, 1.0, 1.0};  // r != 2
  cfg.params = RateParams::exponential(1.0, 1.0, 1.0, 1.0, 2.5, 1.0);
  cfg.trials = 10;
  CHECK_THROWS(verify_rate_thm22(cfg));  // needs r = 2

  RateSweepConfig poly;
  poly.n_sweep = {10};
  poly.tail = ExponentialPowerTail{2.0, 1.0, 1.0};
  poly.params = RateParams::polynomial(1.0, 6.0, 0.1, 1.0, 9.0);
  poly.trials = 10;
  CHECK_THROWS(verify_rate_thm23(poly));  // polynomial params, wrong family
}

TEST_CASE("observed-count moments match the exact enumeration") {
  const Lemma74Report r = verify_lemma74(2, 0.5);
  CHECK(r.mean_linear == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(r.closed_form ==
        doctest::Approx((1.0 - 0.25) / 2.0).epsilon(1e-14));
  CHECK(r.mean_sqrt ==
        doctest::Approx(0.25 * (1.0 + 1.0 / std::sqrt(2.0))).epsilon(1e-14));
  CHECK(r.bound_sqrt == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.bound_holds);
  CHECK(r.exact_match);

  // Full observation: the bound is attained exactly.
  const Lemma74Report full = verify_lemma74(7, 1.0);
  CHECK(full.mean_sqrt ==
        doctest::Approx(full.bound_sqrt).epsilon(1e-13));
  CHECK(full.bound_holds);
  CHECK(full.exact_match);

  CHECK_THROWS(verify_lemma74(0, 0.5));
  CHECK_THROWS(verify_lemma74(13, 0.5));
  CHECK_THROWS(verify_lemma74(5, 0.0));
  CHECK_THROWS(verify_lemma74(5, 1.5));
}

TEST_CASE("column means shrink at the square-root rate in n") {
  TildeTConfig cfg;
  cfg.n = 50;
  cfg.factor = 4;
  cfg.d = 3;
  cfg.rows = 3;
  cfg.reps = 201;
  cfg.seed = 13;
  const TildeTReport r = verify_tildeT(cfg);
  CHECK(r.median_small > 0.0);
  CHECK(r.median_large > 0.0);
  CHECK(r.ratio > 0.2);
  CHECK(r.ratio < 0.9);

  // Degenerate coordinates: every statistic is exactly zero.
  TildeTConfig zero = cfg;
  zero.tail =
      ExponentialPowerTail{2.0, std::numeric_limits<double>::infinity(), 1.0};
  const TildeTReport z = verify_tildeT(zero);
  CHECK(z.median_small == 0.0);
  CHECK(z.median_large == 0.0);
  CHECK(z.ratio == 0.0);
}

TEST_CASE("small size sweeps produce one cell per (b, norm) pair") {
  Type1Config cfg;
  cfg.b_list = {3, 5};
  cfg.norms = {NormKind::sup(), NormKind::lp(2.0)};
  cfg.trials = 30;
  cfg.n = 6;
  cfg.covariance = CsSpec{1.0, 0.2, {}};
  cfg.oracle = true;
  cfg.mc_draws = 200;
  cfg.seed = 17;
  const Type1Table t = type1_sweep(cfg);
  REQUIRE(t.cells.size() == 4);
  CHECK(t.cells[0].b == 3);
  CHECK(t.cells[0].norm == "sup");
  CHECK(t.cells[1].b == 3);
  CHECK(t.cells[1].norm == "2");
  CHECK(t.cells[2].b == 5);
  for (const Type1Cell& cell : t.cells) {
    CHECK(cell.rate >= 0.0);
    CHECK(cell.rate <= 1.0);
    const double se =
        std::sqrt(cell.rate * (1.0 - cell.rate) / static_cast<double>(30));
    CHECK(cell.std_error == doctest::Approx(se).epsilon(1e-12));
  }

  // The estimated-covariance path exercises the shrinkage pipeline.
  Type1Config est = cfg;
  est.oracle = false;
  est.b_list = {4};
  est.norms = {NormKind::sup()};
  const Type1Table te = type1_sweep(est);
  REQUIRE(te.cells.size() == 1);

  Type1Config bad = cfg;
  bad.b_list = {};
  CHECK_THROWS(type1_sweep(bad));
}

TEST_CASE("a heterogeneous variance profile changes the data law") {
  Type1Config cfg;
  cfg.b_list = {4};
  cfg.norms = {NormKind::sup()};
  cfg.trials = 10;
  cfg.n = 5;
  cfg.covariance = CsSpec{1.0, 0.2, {1.0, 4.0}};
  cfg.oracle = true;
  cfg.mc_draws = 100;
  cfg.seed = 19;
  const Type1Table t = type1_sweep(cfg);  // runs; profile recycled to dim 4
  REQUIRE(t.cells.size() == 1);

  const CovarianceStructure cov = cfg.covariance.at_dim(3);
  const Eigen::MatrixXd m = materialize(cov);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 1) == 4.0);
  CHECK(m(2, 2) == 1.0);
  CHECK(m(0, 1) == doctest::Approx(0.2 * 2.0).epsilon(1e-15));
}

TEST_CASE("block-structured correlations split within and across blocks") {
  CsSpec spec{1.0, 0.1, {}, 2, 0.6};
  const Eigen::MatrixXd m = materialize(spec.at_dim(5));
  REQUIRE(m.rows() == 5);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 1) == 0.6);   // same block {0,1}
  CHECK(m(1, 0) == 0.6);
  CHECK(m(0, 2) == 0.1);   // blocks {0,1} vs {2,3}
  CHECK(m(2, 3) == 0.6);
  CHECK(m(3, 4) == 0.1);   // block {4} is a trailing remnant
  CHECK(m(4, 4) == 1.0);
  // Dominant eigenvalue structure stays positive definite.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  // A variance profile combines with the block pattern.
  CsSpec mixed{1.0, 0.0, {1.0, 4.0}, 2, 0.5};
  const Eigen::MatrixXd w = materialize(mixed.at_dim(4));
  CHECK(w(0, 1) == doctest::Approx(0.5 * 2.0).epsilon(1e-15));
  CHECK(w(0, 2) == 0.0);
  CHECK(w(1, 1) == 4.0);
}

TEST_CASE("p-value studies report uniformity and power diagnostics") {
  PvalueUniformityConfig cfg;
  cfg.b = 5;
  cfg.n = 8;
  cfg.trials = 120;
  cfg.covariance = CsSpec{1.0, 0.3, {}};
  cfg.oracle = true;
  cfg.mc_draws = 300;
  cfg.seed = 23;
  const PvalueUniformityReport r = pvalue_uniformity(cfg);
  REQUIRE(r.pvalues.size() == 120);
  CHECK_FALSE(r.low_power);
  CHECK(r.ks_uniform > 0.0);
  CHECK(r.ks_uniform < 0.25);
  const std::vector<long> h = r.histogram(6);
  long total = 0;
  for (long c : h) total += c;
  CHECK(total == 120);
  CHECK_THROWS(r.histogram(0));

  // A location alternative drives p-values toward zero.
  PvalueUniformityConfig shifted = cfg;
  shifted.mean_shift = 3.0;
  const PvalueUniformityReport rs = pvalue_uniformity(shifted);
  CHECK(rs.rejection_rate > r.rejection_rate);
  CHECK(rs.ks_uniform > r.ks_uniform);

  PvalueUniformityConfig tiny = cfg;
  tiny.trials = 20;
  CHECK(pvalue_uniformity(tiny).low_power);
}

TEST_CASE("suite lookup rejects unknown names and lists known ones") {
  CHECK_THROWS(run_suites("bogus", SuiteOptions{}));
  const std::vector<SuiteReport> one = run_suites("lemma74", SuiteOptions{});
  REQUIRE(one.size() == 1);
  CHECK(one[0].suite == "lemma74");
  CHECK(one[0].all_pass);
  CHECK(one[0].checks.size() == 12);
}
