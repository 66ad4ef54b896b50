#pragma once

#include <span>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "hdim/sample.hpp"

namespace hdim {

// Symmetric covariance estimate together with the pairwise-complete
// observation count behind every entry (0 when a pair of columns is never
// jointly observed).
struct CovMatrix {
  Eigen::MatrixXd entries;
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> support_counts;

  int dim() const { return static_cast<int>(entries.rows()); }

  static CovMatrix from_dense(Eigen::MatrixXd m, long count = 0);
};

// Structured shrinkage targets.
struct ScaledIdentityTarget {};
struct DiagonalTarget {};
struct CompoundSymmetricTarget {};
struct HeterogeneousCSTarget {};
struct ExplicitTarget {
  CovMatrix matrix;
};
using ShrinkageTarget =
    std::variant<ScaledIdentityTarget, DiagonalTarget, CompoundSymmetricTarget,
                 HeterogeneousCSTarget, ExplicitTarget>;

std::string target_name(const ShrinkageTarget& target);
ShrinkageTarget target_from_name(const std::string& name);

struct ShrinkageResult {
  CovMatrix matrix;
  double lambda = 0.0;
  ShrinkageTarget target_used;
};

// Null-centered moment estimator: entry (u, v) averages
// (x_iu - mu0_u)(x_iv - mu0_v) over the replicates where both cells are
// observed, dividing by that pairwise count (the null fixes the mean, so
// there is no degree-of-freedom correction). Entries with no jointly
// observed pair are 0 with support_count 0. null_mean entries beyond its
// length count as zero.
CovMatrix sample_cov_null(const TriangularSample& sample,
                          std::span<const double> null_mean);

// Structured estimate fitted to sigma_hat:
//   ScaledIdentity     -> mean(diagonal) * I
//   Diagonal           -> diagonal of sigma_hat
//   CompoundSymmetric  -> common variance = mean diagonal,
//                         common covariance = mean off-diagonal
//   HeterogeneousCS    -> keep the diagonal; off-diagonal (u,v) =
//                         rbar * sqrt(s_uu * s_vv) with rbar the mean
//                         off-diagonal correlation
//   Explicit           -> the supplied matrix
// Correlation-based targets require a strictly positive diagonal.
CovMatrix target_estimate(const CovMatrix& sigma_hat,
                          const ShrinkageTarget& target);

// Closed-form shrinkage weight: sum of estimated variances of the
// covariance entries over the squared distance to the target, clamped to
// [0, 1]; a zero denominator gives 1. Requires n >= 2.
double estimate_lambda(const TriangularSample& sample,
                       std::span<const double> null_mean,
                       const CovMatrix& sigma_hat,
                       const CovMatrix& target_matrix);

// Entrywise (1 - lambda) * sigma_hat + lambda * target.
ShrinkageResult shrink(const CovMatrix& sigma_hat,
                       const CovMatrix& target_matrix, double lambda,
                       ShrinkageTarget target_used = ScaledIdentityTarget{});

// Convenience: fits the target, estimates lambda from the sample, shrinks.
ShrinkageResult shrink_estimated(const TriangularSample& sample,
                                 std::span<const double> null_mean,
                                 const CovMatrix& sigma_hat,
                                 const ShrinkageTarget& target);

// Lower-triangular L with L L^T = sigma. If the triangular decomposition
// fails, eigenvalues are floored at 1e-10 * (largest eigenvalue) and the
// repair is reported via `repaired`.
struct CholeskyFactor {
  Eigen::MatrixXd lower;
  bool repaired = false;
};

CholeskyFactor factorize(const Eigen::MatrixXd& sigma);
CholeskyFactor factorize(const CovMatrix& sigma);

}  // namespace hdim
