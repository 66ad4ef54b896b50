#include "hdim/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

namespace hdim {

CovMatrix CovMatrix::from_dense(Eigen::MatrixXd m, long count) {
  CovMatrix result;
  result.support_counts =
      Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>::Constant(
          m.rows(), m.cols(), count);
  result.entries = std::move(m);
  return result;
}

std::string target_name(const ShrinkageTarget& target) {
  return std::visit(
      [](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ScaledIdentityTarget>) {
          return "identity";
        } else if constexpr (std::is_same_v<T, DiagonalTarget>) {
          return "diag";
        } else if constexpr (std::is_same_v<T, CompoundSymmetricTarget>) {
          return "cs";
        } else if constexpr (std::is_same_v<T, HeterogeneousCSTarget>) {
          return "hcs";
        } else {
          return "explicit";
        }
      },
      target);
}

ShrinkageTarget target_from_name(const std::string& name) {
  if (name == "identity") return ScaledIdentityTarget{};
  if (name == "diag") return DiagonalTarget{};
  if (name == "cs") return CompoundSymmetricTarget{};
  if (name == "hcs") return HeterogeneousCSTarget{};
  throw std::invalid_argument("target: unrecognized kind '" + name + "'");
}

namespace {

// Dense centered-value and observation-indicator matrices (zero where
// unobserved or beyond the row length), so pairwise-complete sums become
// plain matrix products.
void dense_views(const TriangularSample& sample,
                 std::span<const double> null_mean, Eigen::MatrixXd& values,
                 Eigen::MatrixXd& observed) {
  const int n = sample.n();
  const int d = sample.max_dim();
  values.setZero(n, d);
  observed.setZero(n, d);
  for (int i = 0; i < n; ++i) {
    const Row& row = sample.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j].observed) continue;
      const double mu = j < null_mean.size() ? null_mean[j] : 0.0;
      values(i, static_cast<int>(j)) = row[j].value - mu;
      observed(i, static_cast<int>(j)) = 1.0;
    }
  }
}

Eigen::MatrixXd mirrored_self_product(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd prod = Eigen::MatrixXd::Zero(m.cols(), m.cols());
  prod.selfadjointView<Eigen::Upper>().rankUpdate(m.transpose(), 1.0);
  return prod.selfadjointView<Eigen::Upper>();
}

}  // namespace

CovMatrix sample_cov_null(const TriangularSample& sample,
                          std::span<const double> null_mean) {
  Eigen::MatrixXd values, observed;
  dense_views(sample, null_mean, values, observed);
  const Eigen::MatrixXd sums = mirrored_self_product(values);
  const Eigen::MatrixXd counts = mirrored_self_product(observed);

  const int d = sample.max_dim();
  CovMatrix result;
  result.entries.setZero(d, d);
  result.support_counts.setZero(d, d);
  for (int u = 0; u < d; ++u) {
    for (int v = 0; v < d; ++v) {
      const long m = std::lround(counts(u, v));
      result.support_counts(u, v) = m;
      if (m > 0) result.entries(u, v) = sums(u, v) / static_cast<double>(m);
    }
  }
  return result;
}

CovMatrix target_estimate(const CovMatrix& sigma_hat,
                          const ShrinkageTarget& target) {
  const int d = sigma_hat.dim();
  const Eigen::MatrixXd& s = sigma_hat.entries;
  CovMatrix result;
  result.support_counts = sigma_hat.support_counts;

  result.entries = std::visit(
      [&](const auto& t) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ScaledIdentityTarget>) {
          return (s.trace() / d) * Eigen::MatrixXd::Identity(d, d);
        } else if constexpr (std::is_same_v<T, DiagonalTarget>) {
          return s.diagonal().asDiagonal();
        } else if constexpr (std::is_same_v<T, CompoundSymmetricTarget>) {
          const double var = s.trace() / d;
          double cov = 0.0;
          if (d > 1) {
            cov = (s.sum() - s.trace()) / (static_cast<double>(d) * (d - 1));
          }
          Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, cov);
          m.diagonal().setConstant(var);
          return m;
        } else if constexpr (std::is_same_v<T, HeterogeneousCSTarget>) {
          for (int u = 0; u < d; ++u) {
            if (!(s(u, u) > 0.0)) {
              throw std::invalid_argument(
                  "target: correlation-based target needs a positive "
                  "diagonal");
            }
          }
          double rbar = 0.0;
          if (d > 1) {
            double total = 0.0;
            for (int u = 0; u < d; ++u) {
              for (int v = u + 1; v < d; ++v) {
                total += s(u, v) / std::sqrt(s(u, u) * s(v, v));
              }
            }
            rbar = total / (0.5 * d * (d - 1));
          }
          Eigen::MatrixXd m(d, d);
          for (int u = 0; u < d; ++u) {
            for (int v = 0; v < d; ++v) {
              m(u, v) =
                  u == v ? s(u, u) : rbar * std::sqrt(s(u, u) * s(v, v));
            }
          }
          return m;
        } else {
          if (t.matrix.dim() != d) {
            throw std::invalid_argument("target: dimension mismatch");
          }
          return t.matrix.entries;
        }
      },
      target);
  return result;
}

double estimate_lambda(const TriangularSample& sample,
                       std::span<const double> null_mean,
                       const CovMatrix& sigma_hat,
                       const CovMatrix& target_matrix) {
  if (sample.n() < 2) {
    throw std::invalid_argument("estimate_lambda: needs n >= 2");
  }
  if (sigma_hat.dim() != target_matrix.dim()) {
    throw std::invalid_argument("estimate_lambda: dimension mismatch");
  }
  Eigen::MatrixXd values, observed;
  dense_views(sample, null_mean, values, observed);

  // Per-entry cross-product moments: with w_iuv the per-replicate
  // cross-product over jointly observed pairs, the variance of the entry
  // mean is (sum w^2 - m * wbar^2) / ((m - 1) m).
  const Eigen::MatrixXd sq = values.array().square().matrix();
  const Eigen::MatrixXd w2 = mirrored_self_product(sq);
  const Eigen::MatrixXd counts = mirrored_self_product(observed);

  const int d = sigma_hat.dim();
  double numerator = 0.0;
  double denominator = 0.0;
  for (int u = 0; u < d; ++u) {
    for (int v = 0; v < d; ++v) {
      const long m = std::lround(counts(u, v));
      const double wbar = sigma_hat.entries(u, v);
      if (m >= 2) {
        const double centered = w2(u, v) - static_cast<double>(m) * wbar * wbar;
        numerator += centered / (static_cast<double>(m - 1) * m);
      }
      const double gap = wbar - target_matrix.entries(u, v);
      denominator += gap * gap;
    }
  }
  if (denominator == 0.0) return 1.0;
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

ShrinkageResult shrink(const CovMatrix& sigma_hat,
                       const CovMatrix& target_matrix, double lambda,
                       ShrinkageTarget target_used) {
  if (sigma_hat.dim() != target_matrix.dim()) {
    throw std::invalid_argument("shrink: dimension mismatch");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("shrink: lambda must be in [0, 1]");
  }
  ShrinkageResult result;
  result.matrix.entries =
      (1.0 - lambda) * sigma_hat.entries + lambda * target_matrix.entries;
  result.matrix.support_counts = sigma_hat.support_counts;
  result.lambda = lambda;
  result.target_used = std::move(target_used);
  return result;
}

ShrinkageResult shrink_estimated(const TriangularSample& sample,
                                 std::span<const double> null_mean,
                                 const CovMatrix& sigma_hat,
                                 const ShrinkageTarget& target) {
  const CovMatrix fitted = target_estimate(sigma_hat, target);
  const double lambda = estimate_lambda(sample, null_mean, sigma_hat, fitted);
  return shrink(sigma_hat, fitted, lambda, target);
}

CholeskyFactor factorize(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw std::invalid_argument("factorize: matrix must be square");
  }
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if (((sigma - sigma.transpose()).cwiseAbs().maxCoeff()) > 1e-10 * scale) {
    throw std::invalid_argument("factorize: matrix must be symmetric");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) {
    return CholeskyFactor{llt.matrixL(), false};
  }

  // Repair: floor the spectrum at a small fraction of the top eigenvalue,
  // which makes the matrix comfortably positive definite (or exactly zero).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("factorize: eigenvalue decomposition failed");
  }
  const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  if (top == 0.0) {
    return CholeskyFactor{Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols()),
                          true};
  }
  double floor = 1e-10 * top;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const Eigen::VectorXd floored = eig.eigenvalues().cwiseMax(floor);
    Eigen::MatrixXd repaired = eig.eigenvectors() * floored.asDiagonal() *
                               eig.eigenvectors().transpose();
    repaired = (0.5 * (repaired + repaired.transpose())).eval();
    Eigen::LLT<Eigen::MatrixXd> retry(repaired);
    if (retry.info() == Eigen::Success) {
      return CholeskyFactor{retry.matrixL(), true};
    }
    floor *= 100.0;
  }
  throw std::runtime_error("factorize: repair failed");
}

CholeskyFactor factorize(const CovMatrix& sigma) {
  return factorize(sigma.entries);
}

}  // namespace hdim
