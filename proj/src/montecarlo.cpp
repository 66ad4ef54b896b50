#include "hdim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hdim/parallel.hpp"
#include "hdim/rng.hpp"

namespace hdim {

namespace {

double norm_of_column(const Eigen::MatrixXd& y, int col, NormKind kind) {
  StatVector v;
  v.coords.assign(y.col(col).data(), y.col(col).data() + y.rows());
  return norm(v, kind);
}

}  // namespace

NullDistribution draw_null_distribution(const CholeskyFactor& factor, int t,
                                        NormKind kind, double bandwidth,
                                        std::uint64_t seed, int threads) {
  std::vector<NullDistribution> one = draw_null_distributions(
      factor, t, std::span<const NormKind>(&kind, 1), bandwidth, seed,
      threads);
  return std::move(one.front());
}

NullDistribution draw_null_distribution(const CovMatrix& sigma_star, int t,
                                        NormKind kind, double bandwidth,
                                        std::uint64_t seed, int threads) {
  const CholeskyFactor factor = factorize(sigma_star);
  NullDistribution nd =
      draw_null_distribution(factor, t, kind, bandwidth, seed, threads);
  nd.psd_repaired = factor.repaired;
  return nd;
}

std::vector<NullDistribution> draw_null_distributions(
    const CholeskyFactor& factor, int t, std::span<const NormKind> kinds,
    double bandwidth, std::uint64_t seed, int threads) {
  if (t < 1) throw std::invalid_argument("null distribution: t must be >= 1");
  if (!(bandwidth > 0.0)) {
    throw std::invalid_argument("null distribution: bandwidth must be > 0");
  }
  if (kinds.empty()) {
    throw std::invalid_argument("null distribution: no norm kinds given");
  }
  const int dim = static_cast<int>(factor.lower.rows());

  // Draw i fills its own column from sub-stream (seed, kMcDraw, i); the
  // triangular product and norms are per-column, so any thread split
  // yields the same samples.
  Eigen::MatrixXd z(dim, t);
  parallel_for(t, threads, [&](std::int64_t i) {
    RngStream rng(seed, StreamLabel::kMcDraw, static_cast<std::uint64_t>(i));
    for (int j = 0; j < dim; ++j) z(j, static_cast<int>(i)) = rng.normal();
  });
  const Eigen::MatrixXd y =
      factor.lower.triangularView<Eigen::Lower>() * z;

  std::vector<NullDistribution> result(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    result[k].norm_kind = kinds[k];
    result[k].bandwidth = bandwidth;
    result[k].seed = seed;
    result[k].psd_repaired = factor.repaired;
    result[k].norm_samples.assign(static_cast<std::size_t>(t), 0.0);
  }
  parallel_for(t, threads, [&](std::int64_t i) {
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      result[k].norm_samples[static_cast<std::size_t>(i)] =
          norm_of_column(y, static_cast<int>(i), kinds[k]);
    }
  });
  for (auto& nd : result) {
    std::sort(nd.norm_samples.begin(), nd.norm_samples.end());
  }
  return result;
}

double kde_density(const NullDistribution& nd, double x) {
  const double c = nd.bandwidth;
  const double inv_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double total = 0.0;
  for (double s : nd.norm_samples) {
    const double u = (x - s) / c;
    total += inv_norm * std::exp(-0.5 * u * u);
  }
  return total / (static_cast<double>(nd.t()) * c);
}

double p_value(const NullDistribution& nd, double observed) {
  const auto& s = nd.norm_samples;
  // Samples are sorted: everything from the first element >= observed on
  // counts as an exceedance.
  const auto it = std::lower_bound(s.begin(), s.end(), observed);
  const long exceed = static_cast<long>(s.end() - it);
  return static_cast<double>(1 + exceed) / static_cast<double>(nd.t() + 1);
}

double critical_value(const NullDistribution& nd, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("critical_value: alpha must be in (0, 1)");
  }
  const int t = nd.t();
  // ceil((1 - alpha) t), guarded against the representation error of
  // (1 - alpha) * t landing epsilon above an integer.
  long idx = static_cast<long>(
      std::ceil((1.0 - alpha) * static_cast<double>(t) - 1e-9));
  idx = std::clamp(idx, 1L, static_cast<long>(t));
  return nd.norm_samples[static_cast<std::size_t>(idx - 1)];
}

DensityGrid density_grid(const NullDistribution& nd, int points) {
  if (points < 2) throw std::invalid_argument("density_grid: points >= 2");
  const double lo = nd.norm_samples.front() - 5.0 * nd.bandwidth;
  const double hi = nd.norm_samples.back() + 5.0 * nd.bandwidth;
  DensityGrid grid;
  grid.x.reserve(static_cast<std::size_t>(points));
  grid.density.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    grid.x.push_back(x);
    grid.density.push_back(kde_density(nd, x));
  }
  return grid;
}

}  // namespace hdim
