#include "hdim/generate.hpp"

#include <cmath>
#include <stdexcept>

#include "hdim/covariance.hpp"

namespace hdim {

int cov_dim(const CovarianceStructure& cov) {
  return std::visit(
      [](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, IdentityCov>) {
          return c.dim;
        } else if constexpr (std::is_same_v<T, CompoundSymmetricCov>) {
          return c.dim;
        } else if constexpr (std::is_same_v<T, HeterogeneousCSCov>) {
          return static_cast<int>(c.variances.size());
        } else {
          return static_cast<int>(c.matrix.rows());
        }
      },
      cov);
}

Eigen::MatrixXd materialize(const CovarianceStructure& cov) {
  return std::visit(
      [](const auto& c) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, IdentityCov>) {
          if (c.dim < 1) throw std::invalid_argument("covariance: dim < 1");
          return Eigen::MatrixXd::Identity(c.dim, c.dim);
        } else if constexpr (std::is_same_v<T, CompoundSymmetricCov>) {
          if (c.dim < 1) throw std::invalid_argument("covariance: dim < 1");
          if (!(c.variance > 0.0)) {
            throw std::invalid_argument("covariance: variance must be > 0");
          }
          const double lo = c.dim > 1 ? -1.0 / (c.dim - 1) : -1.0;
          if (!(c.correlation > lo && c.correlation < 1.0)) {
            throw std::invalid_argument(
                "covariance: correlation outside (-1/(dim-1), 1)");
          }
          Eigen::MatrixXd m = Eigen::MatrixXd::Constant(
              c.dim, c.dim, c.variance * c.correlation);
          m.diagonal().setConstant(c.variance);
          return m;
        } else if constexpr (std::is_same_v<T, HeterogeneousCSCov>) {
          const int d = static_cast<int>(c.variances.size());
          if (d < 1) throw std::invalid_argument("covariance: dim < 1");
          for (double v : c.variances) {
            if (!(v > 0.0)) {
              throw std::invalid_argument("covariance: variance must be > 0");
            }
          }
          const double lo = d > 1 ? -1.0 / (d - 1) : -1.0;
          if (!(c.correlation > lo && c.correlation < 1.0)) {
            throw std::invalid_argument(
                "covariance: correlation outside (-1/(dim-1), 1)");
          }
          Eigen::MatrixXd m(d, d);
          for (int u = 0; u < d; ++u) {
            for (int v = 0; v < d; ++v) {
              m(u, v) = u == v ? c.variances[u]
                               : c.correlation * std::sqrt(c.variances[u] *
                                                           c.variances[v]);
            }
          }
          return m;
        } else {
          if (c.matrix.rows() != c.matrix.cols() || c.matrix.rows() < 1) {
            throw std::invalid_argument("covariance: matrix must be square");
          }
          if (!c.matrix.isApprox(c.matrix.transpose(), 1e-12)) {
            throw std::invalid_argument("covariance: matrix must be symmetric");
          }
          return c.matrix;
        }
      },
      cov);
}

CovarianceStructure compound_symmetric(int dim, double variance,
                                       double correlation) {
  return CompoundSymmetricCov{dim, variance, correlation};
}

long draw_row_length(const RowLengthLaw& law, int n, int row,
                     std::uint64_t seed) {
  return std::visit(
      [&](const auto& l) -> long {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, FixedRows>) {
          return l.length;
        } else if constexpr (std::is_same_v<T, PowerOfNRows>) {
          return static_cast<long>(
              std::ceil(std::pow(static_cast<double>(n), l.gamma)));
        } else {
          RngStream rng(seed, StreamLabel::kRowLength,
                        static_cast<std::uint64_t>(row));
          return 1 + std::min(rng.poisson(l.mean), l.cap);
        }
      },
      law);
}

long max_row_length(const RowLengthLaw& law, int n) {
  return std::visit(
      [&](const auto& l) -> long {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, FixedRows>) {
          return l.length;
        } else if constexpr (std::is_same_v<T, PowerOfNRows>) {
          return static_cast<long>(
              std::ceil(std::pow(static_cast<double>(n), l.gamma)));
        } else {
          return 1 + l.cap;
        }
      },
      law);
}

double mean_max_row_length(const RowLengthLaw& law, int n, long trials,
                           std::uint64_t seed) {
  if (!std::holds_alternative<ShiftedPoissonRows>(law)) {
    return static_cast<double>(max_row_length(law, n));
  }
  if (trials < 1) throw std::invalid_argument("mean_max_row_length: trials");
  double total = 0.0;
  for (long t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed =
        derive_key(seed, StreamLabel::kTrial, static_cast<std::uint64_t>(t));
    long peak = 1;
    for (int i = 0; i < n; ++i) {
      peak = std::max(peak, draw_row_length(law, n, i, trial_seed));
    }
    total += static_cast<double>(peak);
  }
  return total / static_cast<double>(trials);
}

namespace {

void validate_row_law(const RowLengthLaw& law) {
  std::visit(
      [](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, FixedRows>) {
          if (l.length < 1) {
            throw std::invalid_argument("row law: length must be >= 1");
          }
        } else if constexpr (std::is_same_v<T, PowerOfNRows>) {
          if (!(l.gamma >= 1.0)) {
            throw std::invalid_argument("row law: gamma must be >= 1");
          }
        } else {
          if (!(l.mean >= 0.0) || l.cap < 0) {
            throw std::invalid_argument("row law: mean >= 0 and cap >= 0");
          }
        }
      },
      law);
}

void validate_tail(const TailFamily& tail) {
  std::visit(
      [](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, BoundedTail>) {
          if (!(t.a < t.b)) {
            throw std::invalid_argument("tail: requires a < b");
          }
        } else if constexpr (std::is_same_v<T, ExponentialPowerTail>) {
          if (!(t.r > 0.0 && t.r <= 2.0)) {
            throw std::invalid_argument("tail: r must be in (0, 2]");
          }
          if (!(t.k > 0.0)) {  // +infinity allowed (degenerate law)
            throw std::invalid_argument("tail: k must be > 0");
          }
          if (!(t.c >= 1.0)) {
            throw std::invalid_argument("tail: c must be >= 1");
          }
        } else if constexpr (std::is_same_v<T, PolynomialTail>) {
          if (!(t.k > 1.0)) {
            throw std::invalid_argument(
                "tail: polynomial k must be > 1 (mean undefined otherwise)");
          }
          if (!(t.c >= 1.0)) {
            throw std::invalid_argument("tail: c must be >= 1");
          }
        } else {
          materialize(t.covariance);  // validates
        }
      },
      tail);
}

}  // namespace

void validate(const GenConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("generate: n must be >= 1");
  if (!(cfg.missing_p > 0.0 && cfg.missing_p <= 1.0)) {
    throw std::invalid_argument("generate: missing_p must be in (0, 1]");
  }
  validate_row_law(cfg.row_law);
  validate_tail(cfg.tail);
}

double draw_tail_value(const TailFamily& tail, RngStream& rng) {
  return std::visit(
      [&rng](const auto& t) -> double {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, BoundedTail>) {
          return rng.uniform(t.a, t.b) - 0.5 * (t.a + t.b);
        } else if constexpr (std::is_same_v<T, ExponentialPowerTail>) {
          // P(|x| >= t) = exp(-k t^r): |x| = (E/k)^{1/r}, E ~ Exp(1).
          double magnitude = 0.0;
          if (!std::isinf(t.k)) {
            const double scaled = rng.exponential() / t.k;
            magnitude =
                t.r == 2.0 ? std::sqrt(scaled) : std::pow(scaled, 1.0 / t.r);
          }
          return rng.bernoulli(0.5) ? magnitude : -magnitude;
        } else if constexpr (std::is_same_v<T, PolynomialTail>) {
          // P(|x| >= t) = (1+t)^{-k}: |x| = U^{-1/k} - 1.
          const double magnitude =
              std::pow(rng.uniform01(), -1.0 / t.k) - 1.0;
          return rng.bernoulli(0.5) ? magnitude : -magnitude;
        } else {
          throw std::invalid_argument(
              "draw_tail_value: joint Gaussian coordinates have no scalar law");
        }
      },
      tail);
}

TriangularSample generate_sample(const GenConfig& cfg) {
  validate(cfg);
  const bool gaussian = std::holds_alternative<GaussianCoords>(cfg.tail);
  Eigen::MatrixXd chol;
  if (gaussian) {
    const auto& gc = std::get<GaussianCoords>(cfg.tail);
    chol = factorize(materialize(gc.covariance)).lower;
  }

  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(cfg.n));
  Eigen::VectorXd z;
  for (int i = 0; i < cfg.n; ++i) {
    const long len = draw_row_length(cfg.row_law, cfg.n, i, cfg.seed);
    RngStream values(cfg.seed, StreamLabel::kCellValue,
                     static_cast<std::uint64_t>(i));
    RngStream flags(cfg.seed, StreamLabel::kObservedFlag,
                    static_cast<std::uint64_t>(i));

    Row row(static_cast<std::size_t>(len));
    if (gaussian) {
      if (len > chol.rows()) {
        throw std::invalid_argument(
            "generate: row length exceeds the covariance dimension");
      }
      z.resize(len);
      for (long j = 0; j < len; ++j) z[j] = values.normal();
      // L is lower triangular, so coordinate j only needs z[0..j].
      const Eigen::VectorXd x =
          chol.topLeftCorner(len, len).triangularView<Eigen::Lower>() * z;
      for (long j = 0; j < len; ++j) row[static_cast<std::size_t>(j)].value = x[j];
    } else {
      for (auto& cell : row) cell.value = draw_tail_value(cfg.tail, values);
    }

    if (cfg.missing_p >= 1.0) {
      for (auto& cell : row) cell.observed = true;
    } else {
      for (auto& cell : row) {
        cell.observed = flags.bernoulli(cfg.missing_p);
        if (!cell.observed) cell.value = 0.0;
      }
    }
    rows.push_back(std::move(row));
  }
  return TriangularSample(std::move(rows));
}

TriangularSample generate_random_effects(const RandomEffectsConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("generate: n must be >= 1");
  if (cfg.means.empty()) {
    throw std::invalid_argument("generate: means must be nonempty");
  }
  if (cfg.plate_sd < 0.0 || cfg.noise_sd < 0.0) {
    throw std::invalid_argument("generate: standard deviations must be >= 0");
  }
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    RngStream plate(cfg.seed, StreamLabel::kPlateEffect,
                    static_cast<std::uint64_t>(i));
    RngStream noise(cfg.seed, StreamLabel::kNoise,
                    static_cast<std::uint64_t>(i));
    const double t_i = cfg.plate_sd * plate.normal();
    Row row(cfg.means.size());
    for (std::size_t j = 0; j < cfg.means.size(); ++j) {
      row[j].value = cfg.means[j] + t_i + cfg.noise_sd * noise.normal();
      row[j].observed = true;
    }
    rows.push_back(std::move(row));
  }
  return TriangularSample(std::move(rows));
}

}  // namespace hdim
