#include "hdim/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hdim/parallel.hpp"
#include "hdim/rng.hpp"

namespace hdim {

double log_plus(double x) {
  return std::log(std::max(x, std::numbers::e));
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double ks_to_uniform(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = std::clamp(values[i], 0.0, 1.0);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double ks_to_fitted_normal(std::vector<double> values) {
  if (values.size() < 2) throw std::invalid_argument("ks: sample too small");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  const double sd = std::sqrt(var);
  if (!(sd > 0.0)) return 1.0;
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = normal_cdf((values[i] - mean) / sd);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

double moment_constant(const TailFamily& tail) {
  // M^2 = integral over t >= 0 of the survival envelope of x^2. With the
  // substitution t = s^2 both families integrate in closed form:
  //   exponential: int 2cs exp(-k s^r) ds = c Gamma(2/r + 1) / k^{2/r}
  //   polynomial:  int 2cs (1 + s)^{-k} ds = 2c / ((k - 1)(k - 2))
  if (const auto* ep = std::get_if<ExponentialPowerTail>(&tail)) {
    if (std::isinf(ep->k)) return 0.0;
    const double m2 = ep->c * std::tgamma(2.0 / ep->r + 1.0) /
                      std::pow(ep->k, 2.0 / ep->r);
    return std::sqrt(m2);
  }
  if (const auto* poly = std::get_if<PolynomialTail>(&tail)) {
    if (!(poly->k > 2.0)) {
      throw std::invalid_argument(
          "moment constant: polynomial tails need k > 2");
    }
    const double m2 = 2.0 * poly->c / ((poly->k - 1.0) * (poly->k - 2.0));
    return std::sqrt(m2);
  }
  throw std::invalid_argument(
      "moment constant: defined for exponential and polynomial tails only");
}

// ---------------------------------------------------------------------
// Bound verifiers.
// ---------------------------------------------------------------------

namespace {

// Fills grid points from per-trial statistics: empirical exceedance of
// each threshold plus the binomial standard error.
void fill_from_trials(BoundReport& report, const std::vector<double>& grid,
                      const std::vector<double>& stats,
                      const std::function<double(double)>& bound) {
  const double trials = static_cast<double>(stats.size());
  for (double x : grid) {
    long count = 0;
    for (double s : stats) {
      if (s >= x) ++count;
    }
    GridPoint pt;
    pt.x = x;
    pt.empirical = static_cast<double>(count) / trials;
    pt.bound = bound(x);
    pt.std_error = std::sqrt(pt.empirical * (1.0 - pt.empirical) / trials);
    pt.holds = pt.empirical <= pt.bound + 3.0 * pt.std_error;
    report.points.push_back(pt);
  }
}

void finish_report(BoundReport& report) {
  report.all_hold = true;
  for (const GridPoint& pt : report.points) {
    if (!pt.skipped && !pt.holds) report.all_hold = false;
  }
}

}  // namespace

BoundReport verify_hoeffding(const HoeffdingConfig& cfg) {
  if (!(cfg.a < cfg.b)) throw std::invalid_argument("hoeffding: needs a < b");
  if (cfg.n < 1) throw std::invalid_argument("hoeffding: needs n >= 1");
  const double width = cfg.b - cfg.a;
  const auto bound = [&](double x) {
    return cfg.bound_scale * 2.0 *
           std::exp(-cfg.n * x * x / (2.0 * width * width));
  };

  BoundReport report;
  report.name = cfg.two_point ? "interval-width bound, two-point law"
                              : "interval-width bound, uniform law";

  if (cfg.two_point && cfg.n <= 12) {
    // Exact enumeration of the 2^n sign patterns of +-width/2.
    report.trials = 0;
    const std::uint64_t patterns = 1ULL << cfg.n;
    for (double x : cfg.grid) {
      long double prob = 0.0L;
      for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        const int plus = std::popcount(mask);
        const double sum = (2.0 * plus - cfg.n) * width / 2.0;
        if (std::abs(sum) / cfg.n >= x) prob += 1.0L;
      }
      GridPoint pt;
      pt.x = x;
      pt.empirical = static_cast<double>(prob / patterns);
      pt.bound = bound(x);
      pt.exact = true;
      pt.holds = pt.empirical <= pt.bound;  // zero slack
      report.points.push_back(pt);
    }
    finish_report(report);
    return report;
  }

  const long trials = cfg.trials;
  if (trials < 1) throw std::invalid_argument("hoeffding: trials >= 1");
  std::vector<double> stats(static_cast<std::size_t>(trials), 0.0);
  const double mid = 0.5 * (cfg.a + cfg.b);
  parallel_for(trials, cfg.threads, [&](std::int64_t t) {
    RngStream rng(cfg.seed, StreamLabel::kTrial, static_cast<std::uint64_t>(t));
    double sum = 0.0;
    for (int i = 0; i < cfg.n; ++i) {
      sum += cfg.two_point ? (rng.bernoulli(0.5) ? width / 2.0 : -width / 2.0)
                           : rng.uniform(cfg.a, cfg.b) - mid;
    }
    stats[static_cast<std::size_t>(t)] = std::abs(sum) / cfg.n;
  });
  report.trials = trials;
  fill_from_trials(report, cfg.grid, stats, bound);
  finish_report(report);
  return report;
}

BoundReport verify_subgaussian_sum(const SubgaussianSumConfig& cfg) {
  if (cfg.tail.r != 2.0) {
    throw std::invalid_argument("subgaussian bound: tail must have r = 2");
  }
  if (cfg.n < 1 || cfg.trials < 1) {
    throw std::invalid_argument("subgaussian bound: n and trials >= 1");
  }
  const double k = cfg.tail.k;
  const double c = cfg.tail.c;
  const auto bound = [&](double x) {
    if (x == 0.0) return cfg.bound_scale * 2.0;
    return cfg.bound_scale * 2.0 * std::exp(-cfg.n * k * x * x / (16.0 * c));
  };

  const TailFamily tail = cfg.tail;
  std::vector<double> stats(static_cast<std::size_t>(cfg.trials), 0.0);
  parallel_for(cfg.trials, cfg.threads, [&](std::int64_t t) {
    RngStream rng(cfg.seed, StreamLabel::kTrial, static_cast<std::uint64_t>(t));
    double sum = 0.0;
    for (int i = 0; i < cfg.n; ++i) sum += draw_tail_value(tail, rng);
    stats[static_cast<std::size_t>(t)] = std::abs(sum) / cfg.n;
  });

  BoundReport report;
  report.name = "sub-gaussian mean bound";
  report.trials = cfg.trials;
  fill_from_trials(report, cfg.grid, stats, bound);
  finish_report(report);
  return report;
}

BoundReport verify_maxnorm_bound(const MaxnormBoundConfig& cfg) {
  const auto* ep = std::get_if<ExponentialPowerTail>(&cfg.gen.tail);
  if (ep == nullptr || ep->r != 2.0) {
    throw std::invalid_argument("max-norm bound: tail must have r = 2");
  }
  if (cfg.trials < 1) throw std::invalid_argument("max-norm bound: trials");
  validate(cfg.gen);

  const double mean_max = mean_max_row_length(
      cfg.gen.row_law, cfg.gen.n, cfg.mean_rows_trials,
      derive_key(cfg.gen.seed, StreamLabel::kMisc, 0));
  const double k = ep->k;
  const double c = ep->c;
  const auto bound = [&](double x) {
    if (x == 0.0) return cfg.bound_scale * 2.0 * mean_max;
    return cfg.bound_scale * 2.0 * mean_max *
           std::exp(-k * x * x / (16.0 * c));
  };

  std::vector<double> stats(static_cast<std::size_t>(cfg.trials), 0.0);
  parallel_for(cfg.trials, cfg.threads, [&](std::int64_t t) {
    GenConfig gen = cfg.gen;
    gen.seed =
        derive_key(cfg.gen.seed, StreamLabel::kTrial, static_cast<std::uint64_t>(t));
    const TriangularSample sample = generate_sample(gen);
    StatVector v = normalized_sum(sample, cfg.normalizer);
    stats[static_cast<std::size_t>(t)] = norm(v, NormKind::sup());
  });

  BoundReport report;
  report.name = "column-max bound";
  report.trials = cfg.trials;
  fill_from_trials(report, cfg.grid, stats, bound);
  finish_report(report);
  return report;
}

BoundReport verify_symmetrized_bounds(const SymmetrizedConfig& cfg) {
  if (cfg.n < 1 || cfg.trials < 1) {
    throw std::invalid_argument("symmetrized bound: n and trials >= 1");
  }
  double c = 1.0, k = 1.0, r = 2.0;
  if (const auto* ep = std::get_if<ExponentialPowerTail>(&cfg.tail)) {
    if (cfg.bound == SymmetrizedBound::kPoly) {
      throw std::invalid_argument(
          "symmetrized bound: polynomial form needs a polynomial tail");
    }
    c = ep->c;
    k = ep->k;
    r = ep->r;
  } else if (const auto* poly = std::get_if<PolynomialTail>(&cfg.tail)) {
    if (cfg.bound != SymmetrizedBound::kPoly) {
      throw std::invalid_argument(
          "symmetrized bound: exponential forms need an exponential tail");
    }
    if (!(poly->k > 2.0)) {
      throw std::invalid_argument("symmetrized bound: needs k > 2");
    }
    c = poly->c;
    k = poly->k;
  } else {
    throw std::invalid_argument(
        "symmetrized bound: tail must be exponential or polynomial");
  }

  const double m_const = moment_constant(cfg.tail);
  const double threshold = std::sqrt(8.0) * m_const / std::sqrt(cfg.n);

  // s per grid point: fixed when configured, otherwise the
  // exponent-balancing rule s = n^{1/(2+r)} x^{2/(2+r)} (with the r = 2
  // exponents for the polynomial family). The sharp exponential form
  // requires s >= 1.
  const double balance_r = cfg.bound == SymmetrizedBound::kPoly ? 2.0 : r;
  const auto s_for = [&](double x) {
    double s = cfg.s;
    if (s < 0.0) {
      s = std::pow(static_cast<double>(cfg.n), 1.0 / (2.0 + balance_r)) *
          std::pow(x, 2.0 / (2.0 + balance_r));
    }
    if (cfg.bound == SymmetrizedBound::kExpSharp) s = std::max(s, 1.0);
    return s;
  };
  const auto bound = [&](double x) {
    const double s = s_for(x);
    const double first = 4.0 * std::exp(-cfg.n * x * x / (32.0 * s * s));
    double second = 0.0;
    if (cfg.bound == SymmetrizedBound::kPoly) {
      second = std::pow(2.0, 2.0 + k) * c * cfg.n * std::pow(2.0 + s, -k);
    } else if (cfg.bound == SymmetrizedBound::kExpS) {
      second =
          4.0 * c * cfg.n * std::exp(-k * std::pow(s, r) / std::pow(2.0, r));
    } else {
      const double sharp_first =
          4.0 * std::exp(-cfg.n * k * x * x / (128.0 * c * s * s));
      second =
          4.0 * c * cfg.n * std::exp(-k * std::pow(s, r) / std::pow(2.0, r));
      return cfg.bound_scale * (sharp_first + second);
    }
    return cfg.bound_scale * (first + second);
  };

  const TailFamily tail = cfg.tail;
  std::vector<double> stats(static_cast<std::size_t>(cfg.trials), 0.0);
  parallel_for(cfg.trials, cfg.threads, [&](std::int64_t t) {
    RngStream rng(cfg.seed, StreamLabel::kTrial, static_cast<std::uint64_t>(t));
    double sum = 0.0;
    for (int i = 0; i < cfg.n; ++i) sum += draw_tail_value(tail, rng);
    stats[static_cast<std::size_t>(t)] = std::abs(sum) / cfg.n;
  });

  BoundReport report;
  report.name = "symmetrization bound";
  report.trials = cfg.trials;
  fill_from_trials(report, cfg.grid, stats, bound);
  for (GridPoint& pt : report.points) {
    if (pt.x < threshold) {
      pt.skipped = true;
      pt.holds = false;
    }
  }
  finish_report(report);
  return report;
}

// ---------------------------------------------------------------------
// Rate sweeps.
// ---------------------------------------------------------------------

RateParams RateParams::exponential(double c, double k, double r, double theta2,
                                   double c1, double c3) {
  if (!(c >= 1.0) || !(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("rate params: need c >= 1 and finite k > 0");
  }
  if (!(r > 0.0 && r <= 2.0)) {
    throw std::invalid_argument("rate params: r must be in (0, 2]");
  }
  if (!(theta2 > 0.0) || !(c3 > 0.0)) {
    throw std::invalid_argument("rate params: theta2 and c3 must be > 0");
  }
  if (!(c1 > 2.0 / std::pow(k, 1.0 / r))) {
    throw std::invalid_argument("rate params: c1 must exceed 2 / k^{1/r}");
  }
  RateParams p;
  p.c = c;
  p.k = k;
  p.r = r;
  p.theta1 = k / (16.0 * c);
  p.theta2 = theta2;
  p.c1 = c1;
  p.c2 = k / (128.0 * c);
  p.c3 = c3;
  p.M = moment_constant(ExponentialPowerTail{r, k, c});
  return p;
}

RateParams RateParams::polynomial(double c, double k, double beta,
                                  double gamma, double b) {
  if (!(c >= 1.0) || !(k > 2.0)) {
    throw std::invalid_argument("rate params: need c >= 1 and k > 2");
  }
  if (!(beta > 0.0) || !(k * beta > 0.5)) {
    throw std::invalid_argument("rate params: need beta > 0 and k beta > 1/2");
  }
  if (!((gamma + 1.0) * k * beta > 1.0)) {
    throw std::invalid_argument(
        "rate params: need (gamma + 1) k beta > 1");
  }
  if (!(b > 8.0)) throw std::invalid_argument("rate params: need b > 8");
  RateParams p;
  p.c = c;
  p.k = k;
  p.r = 0.0;  // marks the polynomial-decay regime
  p.beta = beta;
  p.gamma = gamma;
  p.b = b;
  p.M = moment_constant(PolynomialTail{k, c});
  return p;
}

double RateParams::a_n(long n) const {
  return std::sqrt(log_plus(static_cast<double>(n) + 3.0));
}

namespace {

// Streaming sup statistic of one synthetic sample, reproducing
// generate_sample's per-row sub-streams without materializing the rows.
double sweep_sup_statistic(const GenConfig& cfg, bool normalize_by_counts,
                           std::vector<double>& sums,
                           std::vector<long>& counts) {
  sums.clear();
  counts.clear();
  for (int i = 0; i < cfg.n; ++i) {
    const long len = draw_row_length(cfg.row_law, cfg.n, i, cfg.seed);
    if (static_cast<std::size_t>(len) > sums.size()) {
      sums.resize(static_cast<std::size_t>(len), 0.0);
      counts.resize(static_cast<std::size_t>(len), 0);
    }
    RngStream values(cfg.seed, StreamLabel::kCellValue,
                     static_cast<std::uint64_t>(i));
    if (cfg.missing_p >= 1.0) {
      for (long j = 0; j < len; ++j) {
        sums[static_cast<std::size_t>(j)] += draw_tail_value(cfg.tail, values);
        ++counts[static_cast<std::size_t>(j)];
      }
    } else {
      RngStream flags(cfg.seed, StreamLabel::kObservedFlag,
                      static_cast<std::uint64_t>(i));
      for (long j = 0; j < len; ++j) {
        const double value = draw_tail_value(cfg.tail, values);
        if (flags.bernoulli(cfg.missing_p)) {
          sums[static_cast<std::size_t>(j)] += value;
          ++counts[static_cast<std::size_t>(j)];
        }
      }
    }
  }
  double peak = 0.0;
  for (std::size_t j = 0; j < sums.size(); ++j) {
    double v = std::abs(sums[j]);
    if (normalize_by_counts) {
      v /= std::sqrt(static_cast<double>(std::max(counts[j], 1L)));
    }
    peak = std::max(peak, v);
  }
  return peak;
}

struct SweepEnvelope {
  double envelope = 0.0;
  double reference = 0.0;  // denominator of the reported median ratio
};

RateReport run_rate_sweep(
    const RateSweepConfig& cfg, bool normalize_by_counts,
    const std::function<SweepEnvelope(double mean_max, int n)>& envelope_of) {
  if (cfg.n_sweep.empty()) {
    throw std::invalid_argument("rate sweep: empty n sweep");
  }
  if (cfg.trials < 1) throw std::invalid_argument("rate sweep: trials >= 1");

  RateReport report;
  report.trials = cfg.trials;
  report.final_threshold = cfg.final_threshold;

  for (std::size_t ni = 0; ni < cfg.n_sweep.size(); ++ni) {
    const int n = cfg.n_sweep[ni];
    GenConfig base;
    base.n = n;
    base.tail = cfg.tail;
    base.row_law = cfg.row_law;
    base.missing_p = cfg.missing_p;
    base.seed = cfg.seed;
    validate(base);

    const double mean_max = mean_max_row_length(
        cfg.row_law, n, 2000, derive_key(cfg.seed, StreamLabel::kMisc, ni));
    const SweepEnvelope env = envelope_of(mean_max, n);
    const double scaled_envelope = env.envelope * cfg.envelope_scale;

    std::vector<double> stats(static_cast<std::size_t>(cfg.trials), 0.0);
    parallel_for(cfg.trials, cfg.threads, [&](std::int64_t t) {
      GenConfig gen = base;
      gen.seed = derive_key(cfg.seed, StreamLabel::kTrial,
                            ni * static_cast<std::uint64_t>(cfg.trials) +
                                static_cast<std::uint64_t>(t));
      std::vector<double> sums;
      std::vector<long> counts;
      stats[static_cast<std::size_t>(t)] =
          sweep_sup_statistic(gen, normalize_by_counts, sums, counts);
    });

    long exceed = 0;
    for (double s : stats) {
      if (s >= scaled_envelope) ++exceed;
    }
    std::nth_element(stats.begin(), stats.begin() + stats.size() / 2,
                     stats.end());
    const double median = stats[stats.size() / 2];

    RatePoint pt;
    pt.n = n;
    pt.mean_max_rows = mean_max;
    pt.envelope = scaled_envelope;
    pt.exceedance =
        static_cast<double>(exceed) / static_cast<double>(cfg.trials);
    pt.median_ratio = median / env.reference;
    report.points.push_back(pt);
  }

  const double first = report.points.front().exceedance;
  const double last = report.points.back().exceedance;
  report.trend_pass = last <= first && last < cfg.final_threshold;
  double lo = report.points.front().median_ratio;
  double hi = lo;
  report.tail_sum = 0.0;
  for (const RatePoint& pt : report.points) {
    lo = std::min(lo, pt.median_ratio);
    hi = std::max(hi, pt.median_ratio);
    report.tail_sum += pt.exceedance;
  }
  report.ratio_spread = lo > 0.0 ? hi / lo
                                 : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace

RateReport verify_rate_thm22(const RateSweepConfig& cfg) {
  const auto* ep = std::get_if<ExponentialPowerTail>(&cfg.tail);
  if (ep == nullptr || ep->r != 2.0) {
    throw std::invalid_argument("rate sweep: tail must have r = 2");
  }
  const RateParams& p = cfg.params;
  if (std::abs(p.theta1 - ep->k / (16.0 * ep->c)) >
      1e-12 * std::max(1.0, p.theta1)) {
    throw std::invalid_argument(
        "rate sweep: params do not match the tail constants");
  }
  RateReport report = run_rate_sweep(
      cfg, /*normalize_by_counts=*/true, [&](double mean_max, int n) {
        SweepEnvelope env;
        env.envelope = std::sqrt(log_plus(mean_max) / p.theta1 +
                                 p.theta2 * log_plus(n));
        env.reference = std::sqrt(log_plus(mean_max));
        return env;
      });
  report.name = "normalized-sup rate";
  return report;
}

RateReport verify_rate_thm23(const RateSweepConfig& cfg) {
  const RateParams& p = cfg.params;
  const bool polynomial = p.r == 0.0;
  if (polynomial) {
    if (!std::holds_alternative<PolynomialTail>(cfg.tail)) {
      throw std::invalid_argument(
          "rate sweep: polynomial params need a polynomial tail");
    }
  } else {
    const auto* ep = std::get_if<ExponentialPowerTail>(&cfg.tail);
    if (ep == nullptr || !(ep->r < 2.0)) {
      throw std::invalid_argument("rate sweep: tail must have r < 2");
    }
    if (std::abs(p.c2 - ep->k / (128.0 * ep->c)) >
        1e-12 * std::max(1.0, p.c2)) {
      throw std::invalid_argument(
          "rate sweep: params do not match the tail constants");
    }
  }

  RateReport report = run_rate_sweep(
      cfg, /*normalize_by_counts=*/false, [&](double mean_max, int n) {
        SweepEnvelope env;
        const double root_n = std::sqrt(static_cast<double>(n));
        if (polynomial) {
          const double s_n =
              std::pow(n * mean_max, 1.0 / p.k + p.beta);
          env.envelope =
              p.b * root_n * s_n * std::sqrt(log_plus(mean_max));
        } else {
          const double s_n = p.c1 * std::pow(log_plus(mean_max) +
                                                 2.0 * log_plus(n),
                                             1.0 / p.r);
          const double h = std::sqrt(log_plus(mean_max) / p.c2 +
                                     p.c3 * log_plus(n));
          env.envelope = root_n * s_n * h;
        }
        env.reference = env.envelope;
        return env;
      });
  report.name = polynomial ? "raw-sup rate, polynomial tails"
                           : "raw-sup rate, exponential tails";
  return report;
}

}  // namespace hdim
