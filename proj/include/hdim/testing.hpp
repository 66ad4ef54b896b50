#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hdim/covariance.hpp"
#include "hdim/generate.hpp"
#include "hdim/montecarlo.hpp"
#include "hdim/sample.hpp"
#include "hdim/stats.hpp"

namespace hdim {

struct TestSpec {
  NormKind norm = NormKind::sup();
  NormalizerKind normalizer = NormalizerKind::kRandomColumnwise;
  double alpha = 0.05;
  int mc_draws = kDefaultMcDraws;
  double bandwidth = kDefaultBandwidth;
  ShrinkageTarget target = ScaledIdentityTarget{};
  std::optional<double> lambda;  // override; estimated from data when absent
  std::uint64_t seed = 0;
  int threads = 1;  // execution detail only; never affects results
};

struct TestReport {
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  std::vector<double> lambda_used;  // one entry per sample group
  bool psd_repaired = false;
  std::vector<int> n_per_group;  // one entry (one-sample) or two
  int dim = 0;
  std::uint64_t seed = 0;
  NormKind norm = NormKind::sup();
  NormalizerKind normalizer = NormalizerKind::kRandomColumnwise;
  double alpha = 0.05;
  int mc_draws = kDefaultMcDraws;
  double bandwidth = kDefaultBandwidth;
};

// Full one-sample pipeline: center at null_mean, column-normalized sums,
// norm statistic, null-centered covariance, target fit + shrinkage,
// Gaussian Monte Carlo calibration, p-value and critical value.
// `null_out`, when given, receives the calibrated null distribution
// (for density dumps).
TestReport one_sample_test(const TriangularSample& sample,
                           std::span<const double> null_mean,
                           const TestSpec& spec,
                           NullDistribution* null_out = nullptr);

// How the two-sample test centers each group before estimating its
// covariance: at a specified common profile (default all-zero), or at the
// pooled coordinate-wise observed mean of both groups.
enum class TwoSampleCentering { kSpecifiedProfile, kPooledCenter };

// Statistic = norm of the difference of the two groups' normalized sums,
// zero-padded to the common max dimension. The null distribution is the
// norm of G1 - G2 with independent G_k ~ N(0, sigma*_k), each sigma*_k the
// group's own shrinkage estimate.
TestReport two_sample_test(
    const TriangularSample& sample1, const TriangularSample& sample2,
    const TestSpec& spec,
    TwoSampleCentering centering = TwoSampleCentering::kSpecifiedProfile,
    std::span<const double> profile = {}, NullDistribution* null_out = nullptr);

// Limit covariance of the normalized sums under missingness probability p:
// variant 1 (column-count normalizer) scales off-diagonal entries of gamma
// by p and keeps the diagonal; variant 2 (sqrt(n) normalizer) scales
// off-diagonal by p^2 and the diagonal by p.
struct GammaLimit {
  CovarianceStructure gamma;
  double p = 1.0;
  int variant = 1;  // 1 or 2

  Eigen::MatrixXd matrix() const;
};

}  // namespace hdim
