#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "hdim/montecarlo.hpp"
#include "hdim/parallel.hpp"
#include "hdim/rng.hpp"
#include "hdim/verify.hpp"

namespace hdim {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------
// Limit covariance of the normalized sums.
// ---------------------------------------------------------------------

bool CltReport::pass(double rel_tol, double ks_tol) const {
  if (max_rel_err_random > rel_tol || max_rel_err_sqrtn > rel_tol) {
    return false;
  }
  for (double k : ks_random) {
    if (!(k < ks_tol)) return false;
  }
  for (double k : ks_sqrtn) {
    if (!(k < ks_tol)) return false;
  }
  return true;
}

CltReport verify_clt_covariance(const CltConfig& cfg) {
  if (!(cfg.p > 0.0 && cfg.p <= 1.0)) {
    throw std::invalid_argument("clt check: p must be in (0, 1]");
  }
  if (cfg.n < 2 || cfg.d < 1 || cfg.reps < 2) {
    throw std::invalid_argument("clt check: need n >= 2, d >= 1, reps >= 2");
  }
  const long rows = cfg.rows == 0 ? cfg.d : cfg.rows;
  if (rows < cfg.d) {
    throw std::invalid_argument("clt check: row length below d");
  }
  const Eigen::MatrixXd gamma_full = materialize(cfg.gamma);
  if (gamma_full.rows() < rows) {
    throw std::invalid_argument(
        "clt check: covariance dimension below the row length");
  }
  const Eigen::MatrixXd chol =
      factorize(gamma_full).lower.topLeftCorner(rows, rows);

  const std::size_t d = static_cast<std::size_t>(cfg.d);
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  std::vector<double> coord_random(reps * d, 0.0);
  std::vector<double> coord_sqrtn(reps * d, 0.0);
  const double root_n = std::sqrt(static_cast<double>(cfg.n));

  parallel_for(cfg.reps, cfg.threads, [&](std::int64_t rep) {
    const std::uint64_t rep_seed =
        derive_key(cfg.seed, StreamLabel::kTrial, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd z(rows);
    Eigen::VectorXd x(rows);
    std::vector<double> sums(static_cast<std::size_t>(rows), 0.0);
    std::vector<long> counts(static_cast<std::size_t>(rows), 0);
    // Same per-row sub-streams and draw order as the sample generator.
    for (int i = 0; i < cfg.n; ++i) {
      RngStream values(rep_seed, StreamLabel::kCellValue,
                       static_cast<std::uint64_t>(i));
      for (long j = 0; j < rows; ++j) z[j] = values.normal();
      x.noalias() = chol.triangularView<Eigen::Lower>() * z;
      if (cfg.p >= 1.0) {
        for (long j = 0; j < rows; ++j) {
          sums[static_cast<std::size_t>(j)] += x[j];
          ++counts[static_cast<std::size_t>(j)];
        }
      } else {
        RngStream flags(rep_seed, StreamLabel::kObservedFlag,
                        static_cast<std::uint64_t>(i));
        for (long j = 0; j < rows; ++j) {
          if (flags.bernoulli(cfg.p)) {
            sums[static_cast<std::size_t>(j)] += x[j];
            ++counts[static_cast<std::size_t>(j)];
          }
        }
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double count =
          static_cast<double>(std::max(counts[j], 1L));
      coord_random[static_cast<std::size_t>(rep) * d + j] =
          sums[j] / std::sqrt(count);
      coord_sqrtn[static_cast<std::size_t>(rep) * d + j] = sums[j] / root_n;
    }
  });

  const auto covariance_of = [&](const std::vector<double>& coords) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(cfg.d);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      for (std::size_t j = 0; j < d; ++j) {
        mean[static_cast<long>(j)] += coords[rep * d + j];
      }
    }
    mean /= static_cast<double>(reps);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(cfg.d, cfg.d);
    Eigen::VectorXd delta(cfg.d);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      for (std::size_t j = 0; j < d; ++j) {
        delta[static_cast<long>(j)] =
            coords[rep * d + j] - mean[static_cast<long>(j)];
      }
      cov.selfadjointView<Eigen::Upper>().rankUpdate(delta, 1.0);
    }
    cov = cov.selfadjointView<Eigen::Upper>();
    cov /= static_cast<double>(reps - 1);
    return cov;
  };

  CltReport report;
  report.reps = cfg.reps;
  report.empirical_random = covariance_of(coord_random);
  report.empirical_sqrtn = covariance_of(coord_sqrtn);
  report.target_random =
      GammaLimit{cfg.gamma, cfg.p, 1}.matrix().topLeftCorner(cfg.d, cfg.d);
  report.target_sqrtn =
      GammaLimit{cfg.gamma, cfg.p, 2}.matrix().topLeftCorner(cfg.d, cfg.d);

  const auto max_rel_err = [&](const Eigen::MatrixXd& emp,
                               const Eigen::MatrixXd& tgt) {
    double worst = 0.0;
    for (int u = 0; u < cfg.d; ++u) {
      for (int v = 0; v < cfg.d; ++v) {
        const double denom =
            std::abs(tgt(u, v)) > 1e-12 ? std::abs(tgt(u, v)) : 1.0;
        worst = std::max(worst, std::abs(emp(u, v) - tgt(u, v)) / denom);
      }
    }
    return worst;
  };
  report.max_rel_err_random =
      max_rel_err(report.empirical_random, report.target_random);
  report.max_rel_err_sqrtn =
      max_rel_err(report.empirical_sqrtn, report.target_sqrtn);

  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> col(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      col[rep] = coord_random[rep * d + j];
    }
    report.ks_random.push_back(ks_to_fitted_normal(col));
    for (std::size_t rep = 0; rep < reps; ++rep) {
      col[rep] = coord_sqrtn[rep * d + j];
    }
    report.ks_sqrtn.push_back(ks_to_fitted_normal(std::move(col)));
  }
  return report;
}

// ---------------------------------------------------------------------
// Exact enumeration of the observed-count moments.
// ---------------------------------------------------------------------

Lemma74Report verify_lemma74(int n, double p) {
  if (n < 1 || n > 12) {
    throw std::invalid_argument("pattern enumeration: n must be in [1, 12]");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("pattern enumeration: p must be in (0, 1]");
  }
  long double mean_sqrt = 0.0L;
  long double mean_linear = 0.0L;
  const long double q = 1.0L - static_cast<long double>(p);
  const std::uint64_t patterns = 1ULL << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    if ((mask & 1ULL) == 0) continue;  // X_1 unobserved: contributes 0
    const int ones = std::popcount(mask);
    const long double prob =
        std::pow(static_cast<long double>(p), ones) * std::pow(q, n - ones);
    mean_sqrt += prob / std::sqrt(static_cast<long double>(ones));
    mean_linear += prob / static_cast<long double>(ones);
  }

  Lemma74Report report;
  report.n = n;
  report.p = p;
  report.mean_sqrt = static_cast<double>(mean_sqrt);
  report.mean_linear = static_cast<double>(mean_linear);
  report.bound_sqrt = std::sqrt(p / n);
  report.closed_form = (1.0 - std::pow(1.0 - p, n)) / n;
  report.bound_holds =
      report.mean_sqrt <= report.bound_sqrt * (1.0 + 1e-13);
  report.exact_match =
      std::abs(report.mean_linear - report.closed_form) <= 1e-12;
  return report;
}

// ---------------------------------------------------------------------
// Column-mean decay.
// ---------------------------------------------------------------------

TildeTReport verify_tildeT(const TildeTConfig& cfg) {
  if (cfg.n < 1 || cfg.factor < 2 || cfg.reps < 1) {
    throw std::invalid_argument("column-mean check: n, factor, reps");
  }
  if (cfg.d < 1 || cfg.rows < cfg.d) {
    throw std::invalid_argument("column-mean check: need rows >= d >= 1");
  }
  const auto median_at = [&](int n, std::uint64_t salt) {
    std::vector<double> stats(static_cast<std::size_t>(cfg.reps), 0.0);
    parallel_for(cfg.reps, cfg.threads, [&](std::int64_t rep) {
      GenConfig gen;
      gen.n = n;
      gen.tail = cfg.tail;
      gen.row_law = FixedRows{cfg.rows};
      gen.missing_p = cfg.missing_p;
      gen.seed = derive_key(cfg.seed, StreamLabel::kTrial,
                            salt * static_cast<std::uint64_t>(cfg.reps) +
                                static_cast<std::uint64_t>(rep));
      const TriangularSample sample = generate_sample(gen);
      const StatVector t = mean_statistic(sample);
      double peak = 0.0;
      const std::size_t limit =
          std::min<std::size_t>(t.coords.size(), static_cast<std::size_t>(cfg.d));
      for (std::size_t j = 0; j < limit; ++j) {
        peak = std::max(peak, std::abs(t.coords[j]));
      }
      stats[static_cast<std::size_t>(rep)] = peak;
    });
    std::nth_element(stats.begin(), stats.begin() + stats.size() / 2,
                     stats.end());
    return stats[stats.size() / 2];
  };

  TildeTReport report;
  report.median_small = median_at(cfg.n, 0);
  report.median_large = median_at(cfg.n * cfg.factor, 1);
  report.ratio = report.median_small > 0.0
                     ? report.median_large / report.median_small
                     : 0.0;
  return report;
}

// ---------------------------------------------------------------------
// Size / p-value studies.
// ---------------------------------------------------------------------

CovarianceStructure CsSpec::at_dim(int dim) const {
  std::vector<double> variances(static_cast<std::size_t>(dim), variance);
  if (!variance_profile.empty()) {
    for (std::size_t j = 0; j < variances.size(); ++j) {
      variances[j] = variance_profile[j % variance_profile.size()];
    }
  }
  if (block_size > 0) {
    Eigen::MatrixXd m(dim, dim);
    for (int u = 0; u < dim; ++u) {
      const double su = std::sqrt(variances[static_cast<std::size_t>(u)]);
      for (int v = 0; v <= u; ++v) {
        const double rho = u == v ? 1.0
                           : u / block_size == v / block_size
                               ? within_correlation
                               : correlation;
        const double sv = std::sqrt(variances[static_cast<std::size_t>(v)]);
        m(u, v) = m(v, u) = su * sv * rho;
      }
    }
    return ExplicitCov{std::move(m)};
  }
  if (variance_profile.empty()) {
    return CompoundSymmetricCov{dim, variance, correlation};
  }
  return HeterogeneousCSCov{std::move(variances), correlation};
}

namespace {

struct TrialNull {
  CholeskyFactor factor;
  double lambda = 0.0;
};

// Per-trial null model: the true covariance (oracle) or the shrinkage
// pipeline fitted to this trial's sample.
TrialNull fit_trial_null(const TriangularSample& sample,
                         const CholeskyFactor* oracle,
                         const ShrinkageTarget& target) {
  if (oracle != nullptr) return {*oracle, 0.0};
  const CovMatrix sigma_hat = sample_cov_null(sample, {});
  const ShrinkageResult sh = shrink_estimated(sample, {}, sigma_hat, target);
  return {factorize(sh.matrix), sh.lambda};
}

}  // namespace

Type1Table type1_sweep(const Type1Config& cfg) {
  if (cfg.b_list.empty() || cfg.norms.empty()) {
    throw std::invalid_argument("size sweep: b_list and norms are required");
  }
  if (cfg.trials < 1 || cfg.n < 2) {
    throw std::invalid_argument("size sweep: need trials >= 1 and n >= 2");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw std::invalid_argument("size sweep: alpha must be in (0, 1)");
  }
  if (cfg.mc_draws < 1 || !(cfg.bandwidth > 0.0)) {
    throw std::invalid_argument("size sweep: mc_draws and bandwidth");
  }

  Type1Table table;
  table.trials = cfg.trials;
  table.alpha = cfg.alpha;
  const std::size_t num_norms = cfg.norms.size();

  for (std::size_t bi = 0; bi < cfg.b_list.size(); ++bi) {
    const int b = cfg.b_list[bi];
    if (b < 1) throw std::invalid_argument("size sweep: b must be >= 1");
    const CovarianceStructure data_cov = cfg.covariance.at_dim(b);
    CholeskyFactor oracle_factor;
    if (cfg.oracle) oracle_factor = factorize(materialize(data_cov));

    std::vector<unsigned char> rejects(
        static_cast<std::size_t>(cfg.trials) * num_norms, 0);
    parallel_for(cfg.trials, cfg.threads, [&](std::int64_t t) {
      GenConfig gen;
      gen.n = cfg.n;
      gen.tail = GaussianCoords{data_cov};
      gen.row_law = FixedRows{b};
      gen.missing_p = cfg.missing_p;
      gen.seed = derive_key(cfg.seed, StreamLabel::kTrial,
                            bi * static_cast<std::uint64_t>(cfg.trials) +
                                static_cast<std::uint64_t>(t));
      const TriangularSample sample = generate_sample(gen);
      const StatVector v =
          normalized_sum(sample, NormalizerKind::kRandomColumnwise);
      const TrialNull null_model = fit_trial_null(
          sample, cfg.oracle ? &oracle_factor : nullptr, cfg.target);
      const std::vector<NullDistribution> nulls = draw_null_distributions(
          null_model.factor, cfg.mc_draws, cfg.norms, cfg.bandwidth, gen.seed,
          1);
      for (std::size_t k = 0; k < num_norms; ++k) {
        const double stat = norm(v, cfg.norms[k]);
        const double crit = critical_value(nulls[k], cfg.alpha);
        rejects[static_cast<std::size_t>(t) * num_norms + k] =
            stat > crit ? 1 : 0;
      }
    });

    for (std::size_t k = 0; k < num_norms; ++k) {
      long count = 0;
      for (long t = 0; t < cfg.trials; ++t) {
        count += rejects[static_cast<std::size_t>(t) * num_norms + k];
      }
      Type1Cell cell;
      cell.b = b;
      cell.norm = cfg.norms[k].name();
      cell.rate = static_cast<double>(count) / static_cast<double>(cfg.trials);
      cell.std_error = std::sqrt(cell.rate * (1.0 - cell.rate) /
                                 static_cast<double>(cfg.trials));
      table.cells.push_back(cell);
    }
  }
  return table;
}

std::vector<long> PvalueUniformityReport::histogram(int bins) const {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  std::vector<long> h(static_cast<std::size_t>(bins), 0);
  for (double p : pvalues) {
    const long idx = std::min<long>(
        bins - 1, static_cast<long>(p * static_cast<double>(bins)));
    ++h[static_cast<std::size_t>(idx)];
  }
  return h;
}

PvalueUniformityReport pvalue_uniformity(const PvalueUniformityConfig& cfg) {
  if (cfg.b < 1 || cfg.n < 2 || cfg.trials < 1) {
    throw std::invalid_argument("p-value study: b, n, trials");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw std::invalid_argument("p-value study: alpha must be in (0, 1)");
  }
  const CovarianceStructure data_cov = cfg.covariance.at_dim(cfg.b);
  CholeskyFactor oracle_factor;
  if (cfg.oracle) oracle_factor = factorize(materialize(data_cov));

  std::vector<double> pvalues(static_cast<std::size_t>(cfg.trials), 0.0);
  std::vector<unsigned char> rejects(static_cast<std::size_t>(cfg.trials), 0);
  parallel_for(cfg.trials, cfg.threads, [&](std::int64_t t) {
    GenConfig gen;
    gen.n = cfg.n;
    gen.tail = GaussianCoords{data_cov};
    gen.row_law = FixedRows{cfg.b};
    gen.missing_p = cfg.missing_p;
    gen.seed =
        derive_key(cfg.seed, StreamLabel::kTrial, static_cast<std::uint64_t>(t));
    TriangularSample sample = generate_sample(gen);
    if (cfg.mean_shift != 0.0) {
      std::vector<Row> rows = sample.rows();
      for (Row& row : rows) {
        if (!row.empty() && row[0].observed) row[0].value += cfg.mean_shift;
      }
      sample = TriangularSample(std::move(rows));
    }
    const StatVector v =
        normalized_sum(sample, NormalizerKind::kRandomColumnwise);
    const TrialNull null_model = fit_trial_null(
        sample, cfg.oracle ? &oracle_factor : nullptr, cfg.target);
    const NullDistribution nd =
        draw_null_distribution(null_model.factor, cfg.mc_draws, cfg.norm,
                               cfg.bandwidth, gen.seed, 1);
    const double stat = norm(v, cfg.norm);
    pvalues[static_cast<std::size_t>(t)] = p_value(nd, stat);
    rejects[static_cast<std::size_t>(t)] =
        stat > critical_value(nd, cfg.alpha) ? 1 : 0;
  });

  PvalueUniformityReport report;
  report.pvalues = std::move(pvalues);
  report.ks_uniform = ks_to_uniform(report.pvalues);
  long count = 0;
  for (unsigned char r : rejects) count += r;
  report.rejection_rate =
      static_cast<double>(count) / static_cast<double>(cfg.trials);
  report.low_power = cfg.trials < 100;
  return report;
}

// ---------------------------------------------------------------------
// Named suites.
// ---------------------------------------------------------------------

namespace {

long scaled(long base, double scale) {
  return std::max<long>(1, std::lround(static_cast<double>(base) * scale));
}

void push_bound_check(SuiteReport& suite, const std::string& name,
                      const BoundReport& br) {
  long held = 0, skipped = 0, total = 0;
  for (const GridPoint& pt : br.points) {
    ++total;
    if (pt.skipped) {
      ++skipped;
    } else if (pt.holds) {
      ++held;
    }
  }
  SuiteCheck check;
  check.name = name;
  check.pass = br.all_hold;
  check.detail = std::to_string(held) + "/" + std::to_string(total - skipped) +
                 " in-range points hold, " + std::to_string(skipped) +
                 " below validity";
  suite.checks.push_back(check);
}

void finish_suite(SuiteReport& suite) {
  suite.all_pass = true;
  for (const SuiteCheck& c : suite.checks) {
    if (!c.pass) suite.all_pass = false;
  }
}

}  // namespace

SuiteReport run_bounds_suite(const SuiteOptions& opt) {
  SuiteReport suite;
  suite.suite = "bounds";
  const auto seed_of = [&](std::uint64_t i) {
    return derive_key(opt.seed, StreamLabel::kMisc, 1000 + i);
  };

  {  // exact two-point enumerations: zero-slack comparisons
    HoeffdingConfig cfg;
    cfg.a = -1.0;
    cfg.b = 1.0;
    cfg.n = 2;
    cfg.two_point = true;
    cfg.grid = {0.0, 0.5, 1.0};
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "interval bound, two-point n=2 (exact)",
                     verify_hoeffding(cfg));
  }
  {
    HoeffdingConfig cfg;
    cfg.a = 0.0;
    cfg.b = 3.0;
    cfg.n = 12;
    cfg.two_point = true;
    cfg.grid = {0.75, 1.5, 2.25, 3.0};
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "interval bound, two-point n=12 (exact)",
                     verify_hoeffding(cfg));
  }
  {
    HoeffdingConfig cfg;
    cfg.a = -1.0;
    cfg.b = 1.0;
    cfg.n = 20;
    cfg.grid = {0.2, 0.4, 0.6, 0.8};
    cfg.trials = scaled(100000, opt.trial_scale);
    cfg.seed = seed_of(3);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "interval bound, uniform n=20",
                     verify_hoeffding(cfg));
  }
  {
    SubgaussianSumConfig cfg;
    cfg.tail = ExponentialPowerTail{2.0, 1.0, 2.0};
    cfg.n = 10;
    cfg.grid = {0.5, 1.0, 2.0};
    cfg.trials = scaled(100000, opt.trial_scale);
    cfg.seed = seed_of(4);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "sub-gaussian mean, k=1 c=2 n=10",
                     verify_subgaussian_sum(cfg));
  }
  {
    SubgaussianSumConfig cfg;
    cfg.tail = ExponentialPowerTail{2.0, 4.0, 1.0};
    cfg.n = 30;
    cfg.grid = {0.3, 0.6, 1.0};
    cfg.trials = scaled(100000, opt.trial_scale);
    cfg.seed = seed_of(5);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "sub-gaussian mean, k=4 c=1 n=30",
                     verify_subgaussian_sum(cfg));
  }
  {
    SubgaussianSumConfig cfg;
    cfg.tail = ExponentialPowerTail{
        2.0, std::numeric_limits<double>::infinity(), 1.0};
    cfg.n = 10;
    cfg.grid = {0.5, 1.0};
    cfg.trials = scaled(10000, opt.trial_scale);
    cfg.seed = seed_of(6);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "sub-gaussian mean, degenerate k=inf",
                     verify_subgaussian_sum(cfg));
  }
  {
    MaxnormBoundConfig cfg;
    cfg.gen.n = 20;
    cfg.gen.tail = ExponentialPowerTail{2.0, 1.0, 2.0};
    cfg.gen.row_law = FixedRows{50};
    cfg.gen.missing_p = 1.0;
    cfg.gen.seed = seed_of(7);
    cfg.grid = {2.0, 3.0, 4.0, 5.0};
    cfg.trials = scaled(10000, opt.trial_scale);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "column-max bound, complete data",
                     verify_maxnorm_bound(cfg));
  }
  {
    MaxnormBoundConfig cfg;
    cfg.gen.n = 25;
    cfg.gen.tail = ExponentialPowerTail{2.0, 2.0, 1.0};
    cfg.gen.row_law = FixedRows{40};
    cfg.gen.missing_p = 0.8;
    cfg.gen.seed = seed_of(8);
    cfg.grid = {2.0, 3.0, 4.0};
    cfg.trials = scaled(10000, opt.trial_scale);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "column-max bound, 20% missing",
                     verify_maxnorm_bound(cfg));
  }
  {
    SymmetrizedConfig cfg;
    cfg.tail = ExponentialPowerTail{1.0, 1.0, 1.0};
    cfg.n = 50;
    cfg.bound = SymmetrizedBound::kExpS;
    cfg.grid = {0.8, 1.2, 1.8, 2.5};
    cfg.trials = scaled(100000, opt.trial_scale);
    cfg.seed = seed_of(9);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "symmetrization, r=1 balanced s",
                     verify_symmetrized_bounds(cfg));
  }
  {  // larger n: the truncation term is small enough for the bound to bite
    SymmetrizedConfig cfg;
    cfg.tail = ExponentialPowerTail{1.0, 1.0, 1.0};
    cfg.n = 5000;
    cfg.bound = SymmetrizedBound::kExpS;
    cfg.s = 25.0;
    cfg.grid = {1.0, 2.0, 4.0};
    cfg.trials = scaled(100000, opt.trial_scale);
    cfg.seed = seed_of(10);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "symmetrization, r=1 n=5000 fixed s",
                     verify_symmetrized_bounds(cfg));
  }
  {
    SymmetrizedConfig cfg;
    cfg.tail = ExponentialPowerTail{1.5, 1.0, 1.0};
    cfg.n = 50;
    cfg.bound = SymmetrizedBound::kExpSharp;
    cfg.s = 2.0;
    cfg.grid = {0.6, 1.0, 1.6};
    cfg.trials = scaled(100000, opt.trial_scale);
    cfg.seed = seed_of(11);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "symmetrization, sharp form r=1.5",
                     verify_symmetrized_bounds(cfg));
  }
  {
    SymmetrizedConfig cfg;
    cfg.tail = PolynomialTail{4.0, 1.0};
    cfg.n = 50;
    cfg.bound = SymmetrizedBound::kPoly;
    cfg.s = 3.0;
    cfg.grid = {0.5, 1.0, 2.0};
    cfg.trials = scaled(100000, opt.trial_scale);
    cfg.seed = seed_of(12);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "symmetrization, polynomial k=4",
                     verify_symmetrized_bounds(cfg));
  }
  {
    SymmetrizedConfig cfg;
    cfg.tail = PolynomialTail{6.0, 1.0};
    cfg.n = 40;
    cfg.bound = SymmetrizedBound::kPoly;
    cfg.s = 4.0;
    cfg.grid = {1.0, 3.0, 6.0};
    cfg.trials = scaled(100000, opt.trial_scale);
    cfg.seed = seed_of(13);
    cfg.threads = opt.threads;
    cfg.bound_scale = opt.bound_scale;
    push_bound_check(suite, "symmetrization, polynomial k=6",
                     verify_symmetrized_bounds(cfg));
  }

  finish_suite(suite);
  return suite;
}

SuiteReport run_rates_suite(const SuiteOptions& opt) {
  SuiteReport suite;
  suite.suite = "rates";
  const std::vector<int> sweep = {25, 50, 100, 200};

  {  // r = 2, quadratically growing dimension, summable-branch constants
    RateSweepConfig cfg;
    cfg.n_sweep = sweep;
    cfg.tail = ExponentialPowerTail{2.0, 1.0, 1.0};
    cfg.row_law = PowerOfNRows{2.0};
    cfg.params = RateParams::exponential(1.0, 1.0, 2.0, /*theta2=*/20.0,
                                         /*c1=*/3.0, /*c3=*/1.0);
    cfg.trials = scaled(2000, opt.trial_scale);
    cfg.envelope_scale = opt.bound_scale;
    cfg.seed = derive_key(opt.seed, StreamLabel::kMisc, 2001);
    cfg.threads = opt.threads;
    const RateReport r = verify_rate_thm22(cfg);
    SuiteCheck trend;
    trend.name = "normalized-sup envelope trend, dim n^2";
    trend.pass = r.trend_pass;
    trend.detail = fmt("first %.4g, last %.4g", r.points.front().exceedance,
                       r.points.back().exceedance);
    suite.checks.push_back(trend);
    SuiteCheck spread;
    spread.name = "normalized-sup median ratio spread < 3";
    spread.pass = r.ratio_spread < 3.0;
    spread.detail = fmt("max/min of medians %.4g", r.ratio_spread);
    suite.checks.push_back(spread);
    SuiteCheck tail_sum;
    tail_sum.name = "summable-branch exceedance total < 0.1";
    tail_sum.pass = r.tail_sum < 0.1;
    tail_sum.detail = fmt("sum over sweep %.4g", r.tail_sum);
    suite.checks.push_back(tail_sum);
  }
  {  // r = 1 exponential decay, raw sums
    RateSweepConfig cfg;
    cfg.n_sweep = sweep;
    cfg.tail = ExponentialPowerTail{1.0, 1.0, 1.0};
    cfg.row_law = PowerOfNRows{1.0};
    cfg.params = RateParams::exponential(1.0, 1.0, 1.0, /*theta2=*/1.0,
                                         /*c1=*/2.5, /*c3=*/1.0);
    cfg.trials = scaled(2000, opt.trial_scale);
    cfg.envelope_scale = opt.bound_scale;
    cfg.seed = derive_key(opt.seed, StreamLabel::kMisc, 2002);
    cfg.threads = opt.threads;
    const RateReport r = verify_rate_thm23(cfg);
    SuiteCheck trend;
    trend.name = "raw-sup envelope trend, r=1";
    trend.pass = r.trend_pass;
    trend.detail = fmt("first %.4g, last %.4g", r.points.front().exceedance,
                       r.points.back().exceedance);
    suite.checks.push_back(trend);
  }
  {  // polynomial decay k = 6
    RateSweepConfig cfg;
    cfg.n_sweep = sweep;
    cfg.tail = PolynomialTail{6.0, 1.0};
    cfg.row_law = PowerOfNRows{1.0};
    cfg.params = RateParams::polynomial(1.0, 6.0, /*beta=*/0.1, /*gamma=*/1.0,
                                        /*b=*/9.0);
    cfg.trials = scaled(2000, opt.trial_scale);
    cfg.envelope_scale = opt.bound_scale;
    cfg.seed = derive_key(opt.seed, StreamLabel::kMisc, 2003);
    cfg.threads = opt.threads;
    const RateReport r = verify_rate_thm23(cfg);
    SuiteCheck trend;
    trend.name = "raw-sup envelope trend, polynomial k=6";
    trend.pass = r.trend_pass;
    trend.detail = fmt("first %.4g, last %.4g", r.points.front().exceedance,
                       r.points.back().exceedance);
    suite.checks.push_back(trend);
  }

  finish_suite(suite);
  return suite;
}

SuiteReport run_clt_suite(const SuiteOptions& opt) {
  SuiteReport suite;
  suite.suite = "clt";
  // Reduced-budget runs widen the tolerances with the Monte Carlo noise.
  const double widen = 1.0 / std::sqrt(std::min(1.0, opt.trial_scale));
  const double rel_tol = 0.10 * opt.bound_scale * widen;
  const double ks_tol = 0.02 * opt.bound_scale * widen;

  CltConfig cfg;
  cfg.gamma = CompoundSymmetricCov{3, 1.0, 0.3};
  cfg.p = 0.8;
  cfg.n = 300;
  cfg.d = 3;
  cfg.reps = scaled(20000, opt.trial_scale);
  cfg.seed = derive_key(opt.seed, StreamLabel::kMisc, 3001);
  cfg.threads = opt.threads;
  const CltReport r = verify_clt_covariance(cfg);

  SuiteCheck random_err;
  random_err.name = "limit covariance, column-count normalizer";
  random_err.pass = r.max_rel_err_random <= rel_tol;
  random_err.detail = fmt("max relative error %.4g (tol %.4g)",
                          r.max_rel_err_random, rel_tol);
  suite.checks.push_back(random_err);

  SuiteCheck sqrtn_err;
  sqrtn_err.name = "limit covariance, sqrt(n) normalizer";
  sqrtn_err.pass = r.max_rel_err_sqrtn <= rel_tol;
  sqrtn_err.detail = fmt("max relative error %.4g (tol %.4g)",
                         r.max_rel_err_sqrtn, rel_tol);
  suite.checks.push_back(sqrtn_err);

  SuiteCheck ks;
  ks.name = "coordinate normality";
  double worst = 0.0;
  for (double v : r.ks_random) worst = std::max(worst, v);
  for (double v : r.ks_sqrtn) worst = std::max(worst, v);
  ks.pass = worst < ks_tol;
  ks.detail = fmt("worst KS distance %.4g (tol %.4g)", worst, ks_tol);
  suite.checks.push_back(ks);

  {  // complete data: both normalizers must coincide exactly
    CltConfig same = cfg;
    same.p = 1.0;
    same.reps = std::min<long>(same.reps, 2000);
    same.seed = derive_key(opt.seed, StreamLabel::kMisc, 3002);
    const CltReport rr = verify_clt_covariance(same);
    const double diff =
        (rr.empirical_random - rr.empirical_sqrtn).cwiseAbs().maxCoeff();
    SuiteCheck agree;
    agree.name = "complete data: normalizers coincide";
    agree.pass = diff == 0.0;
    agree.detail = fmt("max entry difference %.4g", diff);
    suite.checks.push_back(agree);
  }

  finish_suite(suite);
  return suite;
}

SuiteReport run_lemma74_suite(const SuiteOptions& opt) {
  (void)opt;  // exact arithmetic: no seeds, budgets, or scale hooks
  SuiteReport suite;
  suite.suite = "lemma74";
  for (int n = 1; n <= 12; ++n) {
    bool pass = true;
    double worst_gap = 0.0;
    for (int pi = 1; pi <= 10; ++pi) {
      const double p = pi / 10.0;
      const Lemma74Report r = verify_lemma74(n, p);
      pass = pass && r.bound_holds && r.exact_match;
      worst_gap =
          std::max(worst_gap, std::abs(r.mean_linear - r.closed_form));
      if (pi == 10) {
        // complete observation: the bound is attained
        pass = pass && std::abs(r.mean_sqrt - r.bound_sqrt) <=
                           1e-12 * std::max(1.0, r.bound_sqrt);
      }
    }
    SuiteCheck check;
    check.name = "observed-count moments, n=" + std::to_string(n);
    check.pass = pass;
    check.detail = fmt("10 missing rates, worst closed-form gap %.3g",
                       worst_gap);
    suite.checks.push_back(check);
  }
  finish_suite(suite);
  return suite;
}

std::vector<SuiteReport> run_suites(const std::string& which,
                                    const SuiteOptions& opt) {
  std::vector<SuiteReport> reports;
  if (which == "lemma74") {
    reports.push_back(run_lemma74_suite(opt));
  } else if (which == "bounds") {
    reports.push_back(run_bounds_suite(opt));
  } else if (which == "clt") {
    reports.push_back(run_clt_suite(opt));
  } else if (which == "rates") {
    reports.push_back(run_rates_suite(opt));
  } else if (which == "all") {
    reports.push_back(run_lemma74_suite(opt));
    reports.push_back(run_bounds_suite(opt));
    reports.push_back(run_clt_suite(opt));
    reports.push_back(run_rates_suite(opt));
  } else {
    throw std::invalid_argument("unknown suite: " + which);
  }
  return reports;
}

}  // namespace hdim
