#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hdim/rng.hpp"
#include "hdim/sample.hpp"

namespace hdim {

// ---------------------------------------------------------------------
// Coordinate laws. All are symmetric about zero.
// ---------------------------------------------------------------------

// Uniform on [a, b], shifted by the midpoint so the mean is zero.
struct BoundedTail {
  double a = -1.0;
  double b = 1.0;
};

// Survival function P(|x| >= t) = exp(-k t^r) exactly, r in (0, 2], so the
// envelope c * exp(-k t^r) holds with equality at c = 1 and conservatively
// for any c >= 1. c is carried for use by the bound verifiers; it does not
// affect sampling. k = +infinity gives the degenerate point mass at zero.
struct ExponentialPowerTail {
  double r = 2.0;
  double k = 1.0;
  double c = 1.0;
};

// Survival function P(|x| >= t) = (1 + t)^{-k} exactly (the envelope
// c / (1 + t)^k holds with c = 1); k > 1 so the mean exists. c carried for
// the bound verifiers only.
struct PolynomialTail {
  double k = 4.0;
  double c = 1.0;
};

// ---------------------------------------------------------------------
// Structured covariance for jointly Gaussian coordinates.
// ---------------------------------------------------------------------

struct IdentityCov {
  int dim = 1;
};

// variance on the diagonal, variance * correlation off it.
struct CompoundSymmetricCov {
  int dim = 1;
  double variance = 1.0;
  double correlation = 0.0;
};

// sqrt(var_u * var_v) * correlation off the diagonal.
struct HeterogeneousCSCov {
  std::vector<double> variances;
  double correlation = 0.0;
};

struct ExplicitCov {
  Eigen::MatrixXd matrix;
};

using CovarianceStructure =
    std::variant<IdentityCov, CompoundSymmetricCov, HeterogeneousCSCov,
                 ExplicitCov>;

int cov_dim(const CovarianceStructure& cov);
Eigen::MatrixXd materialize(const CovarianceStructure& cov);

// Coordinates within a row are jointly Gaussian with the given covariance;
// a row of length m uses the leading m x m block.
struct GaussianCoords {
  CovarianceStructure covariance;
};

using TailFamily =
    std::variant<BoundedTail, ExponentialPowerTail, PolynomialTail,
                 GaussianCoords>;

// ---------------------------------------------------------------------
// Row-length laws.
// ---------------------------------------------------------------------

struct FixedRows {
  long length = 1;
};

// ceil(n^gamma) columns for an n-row sample.
struct PowerOfNRows {
  double gamma = 1.0;
};

// 1 + min(Poisson(mean), cap); the cap keeps the support finite.
struct ShiftedPoissonRows {
  double mean = 1.0;
  long cap = 1L << 20;
};

using RowLengthLaw = std::variant<FixedRows, PowerOfNRows, ShiftedPoissonRows>;

// Length of row `row` in an n-row sample. Random laws read the
// per-row stream (seed, kRowLength, row), so lengths are reproducible
// row by row.
long draw_row_length(const RowLengthLaw& law, int n, int row,
                     std::uint64_t seed);

// Largest row length an n-row sample can attain, if the law bounds it.
long max_row_length(const RowLengthLaw& law, int n);

// E(max row length over n rows): exact for deterministic laws, Monte
// Carlo otherwise.
double mean_max_row_length(const RowLengthLaw& law, int n, long trials,
                           std::uint64_t seed);

// ---------------------------------------------------------------------
// Generators.
// ---------------------------------------------------------------------

struct GenConfig {
  int n = 1;
  TailFamily tail = ExponentialPowerTail{};
  RowLengthLaw row_law = FixedRows{1};
  double missing_p = 1.0;  // P(cell observed), in (0, 1]
  std::uint64_t seed = 0;
};

void validate(const GenConfig& cfg);

// Draws an n-row sample: lengths from the row law, values i.i.d. (or
// jointly Gaussian) from the tail family, observed flags i.i.d.
// Bernoulli(missing_p). Rows use the sub-streams (seed, kRowLength, i),
// (seed, kCellValue, i), (seed, kObservedFlag, i); when missing_p == 1
// the flag stream is never consumed.
TriangularSample generate_sample(const GenConfig& cfg);

// One scalar draw from a univariate family (everything but GaussianCoords).
double draw_tail_value(const TailFamily& tail, RngStream& rng);

// Plate-model data: cell (i, j) = means[j] + T_i + eps_{i,j}, with the
// plate effect T_i ~ N(0, plate_sd^2) shared across row i and noise
// eps i.i.d. N(0, noise_sd^2). All cells observed; every row has length
// means.size().
struct RandomEffectsConfig {
  int n = 1;
  std::vector<double> means;
  double plate_sd = 0.0;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

TriangularSample generate_random_effects(const RandomEffectsConfig& cfg);

// Convenience builders.
CovarianceStructure compound_symmetric(int dim, double variance,
                                       double correlation);

}  // namespace hdim
