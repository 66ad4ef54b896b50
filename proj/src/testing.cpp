#include "hdim/testing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdim/parallel.hpp"
#include "hdim/rng.hpp"

namespace hdim {

namespace {

struct FittedNull {
  CholeskyFactor factor;
  double lambda = 0.0;
};

FittedNull fit_group_null(const TriangularSample& sample,
                          std::span<const double> null_mean,
                          const TestSpec& spec) {
  const CovMatrix sigma_hat = sample_cov_null(sample, null_mean);
  const CovMatrix fitted = target_estimate(sigma_hat, spec.target);
  const double lambda =
      spec.lambda ? *spec.lambda
                  : estimate_lambda(sample, null_mean, sigma_hat, fitted);
  const ShrinkageResult shrunk = shrink(sigma_hat, fitted, lambda, spec.target);
  return FittedNull{factorize(shrunk.matrix), lambda};
}

void fill_common_fields(TestReport& report, const TestSpec& spec) {
  report.seed = spec.seed;
  report.norm = spec.norm;
  report.normalizer = spec.normalizer;
  report.alpha = spec.alpha;
  report.mc_draws = spec.mc_draws;
  report.bandwidth = spec.bandwidth;
}

void finish_decision(TestReport& report, const NullDistribution& nd,
                     const TestSpec& spec) {
  report.p_value = p_value(nd, report.statistic);
  report.critical_value = critical_value(nd, spec.alpha);
  report.reject = report.statistic > report.critical_value;
}

std::vector<double> pooled_column_means(const TriangularSample& a,
                                        const TriangularSample& b) {
  const std::size_t d =
      static_cast<std::size_t>(std::max(a.max_dim(), b.max_dim()));
  std::vector<double> sums(d, 0.0);
  std::vector<long> counts(d, 0);
  for (const TriangularSample* s : {&a, &b}) {
    for (const Row& row : s->rows()) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j].observed) {
          sums[j] += row[j].value;
          ++counts[j];
        }
      }
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    sums[j] = counts[j] > 0 ? sums[j] / static_cast<double>(counts[j]) : 0.0;
  }
  return sums;
}

}  // namespace

TestReport one_sample_test(const TriangularSample& sample,
                           std::span<const double> null_mean,
                           const TestSpec& spec, NullDistribution* null_out) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw std::invalid_argument("test: alpha must be in (0, 1)");
  }
  const TriangularSample centered = center(sample, null_mean);
  const StatVector stat_vec = normalized_sum(centered, spec.normalizer);

  TestReport report;
  fill_common_fields(report, spec);
  report.statistic = norm(stat_vec, spec.norm);
  report.n_per_group = {sample.n()};
  report.dim = sample.max_dim();

  const FittedNull fitted = fit_group_null(sample, null_mean, spec);
  report.lambda_used = {fitted.lambda};
  report.psd_repaired = fitted.factor.repaired;

  const NullDistribution nd =
      draw_null_distribution(fitted.factor, spec.mc_draws, spec.norm,
                             spec.bandwidth, spec.seed, spec.threads);
  finish_decision(report, nd, spec);
  if (null_out != nullptr) *null_out = nd;
  return report;
}

TestReport two_sample_test(const TriangularSample& sample1,
                           const TriangularSample& sample2,
                           const TestSpec& spec, TwoSampleCentering centering,
                           std::span<const double> profile,
                           NullDistribution* null_out) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw std::invalid_argument("test: alpha must be in (0, 1)");
  }
  std::vector<double> pooled;
  if (centering == TwoSampleCentering::kPooledCenter) {
    if (!profile.empty()) {
      throw std::invalid_argument(
          "test: pooled centering does not take a profile");
    }
    pooled = pooled_column_means(sample1, sample2);
    profile = pooled;
  }

  const StatVector v1 =
      normalized_sum(center(sample1, profile), spec.normalizer);
  const StatVector v2 =
      normalized_sum(center(sample2, profile), spec.normalizer);
  const int dim = std::max(sample1.max_dim(), sample2.max_dim());
  if (dim < 1) throw std::invalid_argument("test: empty dimension");

  StatVector diff;
  diff.coords.assign(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t j = 0; j < v1.coords.size(); ++j) {
    diff.coords[j] += v1.coords[j];
  }
  for (std::size_t j = 0; j < v2.coords.size(); ++j) {
    diff.coords[j] -= v2.coords[j];
  }

  TestReport report;
  fill_common_fields(report, spec);
  report.statistic = norm(diff, spec.norm);
  report.n_per_group = {sample1.n(), sample2.n()};
  report.dim = dim;

  const FittedNull fit1 = fit_group_null(sample1, profile, spec);
  const FittedNull fit2 = fit_group_null(sample2, profile, spec);
  report.lambda_used = {fit1.lambda, fit2.lambda};
  report.psd_repaired = fit1.factor.repaired || fit2.factor.repaired;

  // Null samples: norms of G1 - G2 with independent draws per group,
  // zero-padded to the common dimension. Draw i consumes the group-1
  // normals first, then group-2, from its own sub-stream.
  const int d1 = static_cast<int>(fit1.factor.lower.rows());
  const int d2 = static_cast<int>(fit2.factor.lower.rows());
  NullDistribution nd;
  nd.norm_kind = spec.norm;
  nd.bandwidth = spec.bandwidth;
  nd.seed = spec.seed;
  nd.psd_repaired = report.psd_repaired;
  nd.norm_samples.assign(static_cast<std::size_t>(spec.mc_draws), 0.0);
  parallel_for(spec.mc_draws, spec.threads, [&](std::int64_t i) {
    RngStream rng(spec.seed, StreamLabel::kMcDraw,
                  static_cast<std::uint64_t>(i));
    Eigen::VectorXd z1(d1), z2(d2);
    for (int j = 0; j < d1; ++j) z1[j] = rng.normal();
    for (int j = 0; j < d2; ++j) z2[j] = rng.normal();
    const Eigen::VectorXd g1 =
        fit1.factor.lower.triangularView<Eigen::Lower>() * z1;
    const Eigen::VectorXd g2 =
        fit2.factor.lower.triangularView<Eigen::Lower>() * z2;
    StatVector d;
    d.coords.assign(static_cast<std::size_t>(dim), 0.0);
    for (int j = 0; j < d1; ++j) d.coords[static_cast<std::size_t>(j)] += g1[j];
    for (int j = 0; j < d2; ++j) d.coords[static_cast<std::size_t>(j)] -= g2[j];
    nd.norm_samples[static_cast<std::size_t>(i)] = norm(d, spec.norm);
  });
  std::sort(nd.norm_samples.begin(), nd.norm_samples.end());

  finish_decision(report, nd, spec);
  if (null_out != nullptr) *null_out = nd;
  return report;
}

Eigen::MatrixXd GammaLimit::matrix() const {
  if (variant != 1 && variant != 2) {
    throw std::invalid_argument("gamma limit: variant must be 1 or 2");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("gamma limit: p must be in (0, 1]");
  }
  Eigen::MatrixXd m = materialize(gamma);
  const double off = std::pow(p, variant);
  const double diag = std::pow(p, variant - 1);
  for (int u = 0; u < m.rows(); ++u) {
    for (int v = 0; v < m.cols(); ++v) {
      m(u, v) *= (u == v ? diag : off);
    }
  }
  return m;
}

}  // namespace hdim
