#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdim/covariance.hpp"
#include "hdim/generate.hpp"
#include "hdim/stats.hpp"
#include "hdim/testing.hpp"

namespace hdim {

// ln(max(x, e)); always >= 1.
double log_plus(double x);

// Standard normal CDF.
double normal_cdf(double x);

// Kolmogorov-Smirnov sup-distance of a sample to Uniform(0,1) and to the
// normal fitted by sample mean/sd.
double ks_to_uniform(std::vector<double> values);
double ks_to_fitted_normal(std::vector<double> values);

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol);

// Moment constant M with M^2 = integral of the family's survival envelope
// of x^2: c * exp(-k t^{r/2}) for exponential tails, c (1 + sqrt(t))^{-k}
// for polynomial tails (k > 2). Both integrals are elementary:
//   exponential  M^2 = c Gamma(2/r + 1) / k^{2/r}
//   polynomial   M^2 = 2c / ((k - 1)(k - 2))
double moment_constant(const TailFamily& tail);

// ---------------------------------------------------------------------
// Tail-bound verifiers. Each compares an empirical exceedance probability
// against a closed-form bound on a grid of thresholds.
// ---------------------------------------------------------------------

struct GridPoint {
  double x = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
  double std_error = 0.0;  // 0 for exact enumeration
  bool exact = false;      // computed by enumeration, no MC error
  bool skipped = false;    // below the bound's validity threshold
  bool holds = false;      // empirical <= bound + 3 * std_error
};

struct BoundReport {
  std::string name;
  std::vector<GridPoint> points;
  long trials = 0;
  bool all_hold = false;  // over non-skipped points
};

// P(|sum X_i| / n >= x) <= 2 exp(-n x^2 / (2 (b-a)^2)) for mean-zero
// variables supported on an interval of width b - a. two_point replaces
// the centered uniform law by the extreme two-point law on +-(b-a)/2;
// two-point laws with n <= 12 are enumerated exactly.
struct HoeffdingConfig {
  double a = -1.0;
  double b = 1.0;
  int n = 10;
  bool two_point = false;
  std::vector<double> grid;
  long trials = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  double bound_scale = 1.0;  // failure-injection hook for the test suite
};
BoundReport verify_hoeffding(const HoeffdingConfig& cfg);

// P(|sum X_i| / n >= x) <= 2 exp(-n k x^2 / (16 c)) for tails with r = 2.
struct SubgaussianSumConfig {
  ExponentialPowerTail tail;  // r must equal 2
  int n = 10;
  std::vector<double> grid;
  long trials = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  double bound_scale = 1.0;
};
BoundReport verify_subgaussian_sum(const SubgaussianSumConfig& cfg);

// P(max_j |column sum_j| / sqrt(V_j) >= x) <= 2 E(max rows) exp(-k x^2 /
// (16 c)) for r = 2 coordinate tails under any row law / missingness.
struct MaxnormBoundConfig {
  GenConfig gen;  // tail must be an r = 2 ExponentialPowerTail
  NormalizerKind normalizer = NormalizerKind::kRandomColumnwise;
  std::vector<double> grid;
  long trials = 10000;
  long mean_rows_trials = 100000;  // MC budget for E(max rows) if random
  int threads = 1;
  double bound_scale = 1.0;
};
BoundReport verify_maxnorm_bound(const MaxnormBoundConfig& cfg);

// Symmetrization bounds for P(|sum X_i| >= n x), valid for
// x >= sqrt(8) M / sqrt(n):
//   kExpS      4 exp(-n x^2 / (32 s^2)) + 4 c n exp(-k s^r / 2^r), s >= 0
//   kExpSharp  4 exp(-n k x^2 / (128 c s^2)) + same second term,   s >= 1
//   kPoly      4 exp(-n x^2 / (32 s^2)) + 2^{2+k} c n / (2+s)^k,   s >= 0
// Grid points below the validity threshold are reported skipped.
enum class SymmetrizedBound { kExpS, kExpSharp, kPoly };

struct SymmetrizedConfig {
  TailFamily tail;  // ExponentialPowerTail (r < 2 typical) or PolynomialTail
  int n = 50;
  SymmetrizedBound bound = SymmetrizedBound::kExpS;
  double s = -1.0;  // < 0 selects s = n^{1/(2+r)} x^{2/(2+r)} per point
  std::vector<double> grid;
  long trials = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  double bound_scale = 1.0;
};
BoundReport verify_symmetrized_bounds(const SymmetrizedConfig& cfg);

// ---------------------------------------------------------------------
// Consistency-rate sweeps.
// ---------------------------------------------------------------------

// Envelope constants. theta1 and c2 are pinned to the tail constants
// (theta1 = k/(16c), c2 = k/(128c)); c1 must exceed 2 / k^{1/r}.
struct RateParams {
  double c = 1.0;
  double k = 1.0;
  double r = 2.0;
  double theta1 = 0.0;
  double theta2 = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 1.0;
  double beta = 0.0;   // polynomial case
  double gamma = 1.0;  // E(max rows) growth exponent, polynomial case
  double b = 9.0;      // polynomial envelope multiplier, > 8
  double M = 0.0;      // moment constant of the tail family

  static RateParams exponential(double c, double k, double r, double theta2,
                                double c1, double c3);
  static RateParams polynomial(double c, double k, double beta, double gamma,
                               double b);

  double a_n(long n) const;  // sqrt(L(n + 3)) normalizing sequence
};

struct RatePoint {
  int n = 0;
  double mean_max_rows = 0.0;
  double envelope = 0.0;
  double exceedance = 0.0;     // P(statistic >= envelope)
  double median_ratio = 0.0;   // median statistic / reference scale
};

struct RateReport {
  std::string name;
  std::vector<RatePoint> points;
  long trials = 0;
  // final exceedance <= first and below the threshold ("converges to 0"
  // operationalized over the finite sweep)
  bool trend_pass = false;
  double final_threshold = 0.05;
  double ratio_spread = 0.0;  // max/min of per-n median ratios
  double tail_sum = 0.0;      // sum of exceedances over the sweep
};

struct RateSweepConfig {
  std::vector<int> n_sweep;
  TailFamily tail;
  RowLengthLaw row_law = FixedRows{1};  // PowerOfN applies per sweep n
  double missing_p = 1.0;
  RateParams params;
  long trials = 2000;
  double final_threshold = 0.05;
  double envelope_scale = 1.0;  // failure-injection / sensitivity hook
  std::uint64_t seed = 1;
  int threads = 1;
};

// sup-norm of the column-normalized sums against h(n) =
// sqrt(L(E max rows)/theta1 + theta2 L(n)); r = 2 tails.
RateReport verify_rate_thm22(const RateSweepConfig& cfg);

// sup-norm of the raw column sums against sqrt(n) s_n h(n) for
// exponential tails with r < 2, or b sqrt(n) s_n sqrt(L(E max rows)) with
// s_n = (n E max rows)^{1/k + beta} for polynomial tails.
RateReport verify_rate_thm23(const RateSweepConfig& cfg);

// ---------------------------------------------------------------------
// Limit-covariance and convergence checks.
// ---------------------------------------------------------------------

struct CltConfig {
  CovarianceStructure gamma = IdentityCov{3};
  double p = 1.0;
  int n = 300;
  int d = 3;
  long reps = 20000;
  long rows = 0;  // fixed row length; 0 means d
  std::uint64_t seed = 1;
  int threads = 1;
};

struct CltReport {
  Eigen::MatrixXd empirical_random;  // d x d, column-count normalizer
  Eigen::MatrixXd empirical_sqrtn;
  Eigen::MatrixXd target_random;  // variant-1 limit
  Eigen::MatrixXd target_sqrtn;   // variant-2 limit
  double max_rel_err_random = 0.0;
  double max_rel_err_sqrtn = 0.0;
  std::vector<double> ks_random;  // per coordinate, to the fitted normal
  std::vector<double> ks_sqrtn;
  long reps = 0;

  bool pass(double rel_tol, double ks_tol) const;
};

CltReport verify_clt_covariance(const CltConfig& cfg);

// Exact enumeration over the 2^n observation patterns of n Bernoulli(p)
// indicators: E(X_1/sqrt(A_n)) against the bound sqrt(p/n) (equality at
// p = 1) and E(X_1/A_n) against the closed form (1-(1-p)^n)/n, where A_n
// is the number of successes (terms with X_1 = 0 contribute 0).
struct Lemma74Report {
  int n = 0;
  double p = 0.0;
  double mean_sqrt = 0.0;
  double bound_sqrt = 0.0;
  double mean_linear = 0.0;
  double closed_form = 0.0;
  bool bound_holds = false;
  bool exact_match = false;  // |mean_linear - closed_form| <= 1e-12
};

Lemma74Report verify_lemma74(int n, double p);

// Median of max_{j<d} |column mean_j| at n and factor*n; the ratio should
// sit near the square-root rate (about 1/2 when factor = 4).
struct TildeTConfig {
  int n = 100;
  int factor = 4;
  int d = 5;
  long rows = 5;
  double missing_p = 1.0;
  TailFamily tail = ExponentialPowerTail{2.0, 1.0, 1.0};
  long reps = 500;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct TildeTReport {
  double median_small = 0.0;
  double median_large = 0.0;
  double ratio = 0.0;  // median_large / median_small
};

TildeTReport verify_tildeT(const TildeTConfig& cfg);

// ---------------------------------------------------------------------
// Size / p-value studies (the simulation-table drivers).
// ---------------------------------------------------------------------

// Data covariance used by the sweep drivers: compound symmetric with the
// given variance/correlation, instantiated at each sweep dimension. A
// nonempty variance_profile is recycled across coordinates instead of the
// constant variance (unequal variances with common correlation).
// A block_size > 0 carves the coordinates into contiguous blocks of that
// size; pairs inside a block use within_correlation, pairs across blocks
// use `correlation` (unequal correlations with a common diagonal; PSD
// whenever 0 <= correlation <= within_correlation < 1).
struct CsSpec {
  double variance = 1.0;
  double correlation = 0.0;
  std::vector<double> variance_profile;
  int block_size = 0;
  double within_correlation = 0.0;

  CovarianceStructure at_dim(int dim) const;
};

struct Type1Config {
  std::vector<int> b_list;
  std::vector<NormKind> norms;
  long trials = 1000;
  int n = 10;
  CsSpec covariance;
  ShrinkageTarget target = CompoundSymmetricTarget{};
  bool oracle = false;  // use the true covariance, skip estimation
  double alpha = 0.05;
  int mc_draws = kDefaultMcDraws;
  double bandwidth = kDefaultBandwidth;
  double missing_p = 1.0;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct Type1Cell {
  int b = 0;
  std::string norm;
  double rate = 0.0;
  double std_error = 0.0;
};

struct Type1Table {
  std::vector<Type1Cell> cells;  // b-major, norm-minor order
  long trials = 0;
  double alpha = 0.05;
};

Type1Table type1_sweep(const Type1Config& cfg);

struct PvalueUniformityConfig {
  int b = 100;
  int n = 10;
  long trials = 2000;
  CsSpec covariance;
  bool oracle = true;
  ShrinkageTarget target = CompoundSymmetricTarget{};
  NormKind norm = NormKind::sup();
  double mean_shift = 0.0;  // added to the first coordinate (alternative)
  double alpha = 0.05;
  int mc_draws = kDefaultMcDraws;
  double bandwidth = kDefaultBandwidth;
  double missing_p = 1.0;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct PvalueUniformityReport {
  std::vector<double> pvalues;
  double ks_uniform = 0.0;
  double rejection_rate = 0.0;
  bool low_power = false;  // fewer than 100 trials

  std::vector<long> histogram(int bins) const;
};

PvalueUniformityReport pvalue_uniformity(const PvalueUniformityConfig& cfg);

// ---------------------------------------------------------------------
// Named suites shared by the CLI and the acceptance harness.
// ---------------------------------------------------------------------

struct SuiteOptions {
  std::uint64_t seed = 20100836;
  int threads = 1;
  double bound_scale = 1.0;   // scales every closed-form bound (hook)
  double trial_scale = 1.0;   // scales Monte Carlo budgets
};

struct SuiteCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteCheck> checks;
  bool all_pass = false;
};

SuiteReport run_bounds_suite(const SuiteOptions& opt);
SuiteReport run_rates_suite(const SuiteOptions& opt);
SuiteReport run_clt_suite(const SuiteOptions& opt);
SuiteReport run_lemma74_suite(const SuiteOptions& opt);
std::vector<SuiteReport> run_suites(const std::string& which,
                                    const SuiteOptions& opt);

}  // namespace hdim
