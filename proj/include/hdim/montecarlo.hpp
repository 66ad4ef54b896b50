#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hdim/covariance.hpp"
#include "hdim/stats.hpp"

namespace hdim {

inline constexpr int kDefaultMcDraws = 2000;
inline constexpr double kDefaultBandwidth = 0.7;

// Calibrated null distribution: t Monte Carlo norm samples of Gaussian
// vectors N(0, sigma*), plus the Gaussian-kernel bandwidth used for
// density reporting.
struct NullDistribution {
  std::vector<double> norm_samples;  // sorted ascending
  double bandwidth = kDefaultBandwidth;
  NormKind norm_kind = NormKind::sup();
  std::uint64_t seed = 0;
  bool psd_repaired = false;

  int t() const { return static_cast<int>(norm_samples.size()); }
};

// Draws Y_i = L * Z_i for i = 1..t with Z_i standard Gaussian; the null
// samples are the sorted norms of the Y_i. Draw i uses the sub-stream
// (seed, kMcDraw, i), so results are independent of the thread count.
NullDistribution draw_null_distribution(const CovMatrix& sigma_star, int t,
                                        NormKind kind, double bandwidth,
                                        std::uint64_t seed, int threads = 1);
NullDistribution draw_null_distribution(const CholeskyFactor& factor, int t,
                                        NormKind kind, double bandwidth,
                                        std::uint64_t seed, int threads = 1);

// One set of Gaussian draws evaluated under several norms at once (the
// sweep drivers reuse the same Monte Carlo samples per trial across norm
// kinds, as the density figures do).
std::vector<NullDistribution> draw_null_distributions(
    const CholeskyFactor& factor, int t, std::span<const NormKind> kinds,
    double bandwidth, std::uint64_t seed, int threads = 1);

// Gaussian-kernel density estimate at x:
// (1 / (t c)) * sum_i phi((x - sample_i) / c).
double kde_density(const NullDistribution& nd, double x);

// Continuity-corrected empirical survival probability:
// (1 + #{i : sample_i >= observed}) / (t + 1); always in (0, 1].
double p_value(const NullDistribution& nd, double observed);

// The ceil((1 - alpha) * t)-th order statistic of the null samples; the
// rule "statistic > c" then has empirical size <= alpha on the MC sample.
double critical_value(const NullDistribution& nd, double alpha);

// Writes a regular-grid density dump (x, kde_density) usable by any
// plotting tool; grid spans [min - 5c, max + 5c] with `points` points.
struct DensityGrid {
  std::vector<double> x;
  std::vector<double> density;
};
DensityGrid density_grid(const NullDistribution& nd, int points = 512);

}  // namespace hdim
