#include "hdim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hdim {

NormKind NormKind::lp(double rho) {
  if (!(rho >= 2.0)) {
    throw std::invalid_argument("NormKind: rho must be >= 2");
  }
  return NormKind(false, rho);
}

std::string NormKind::name() const {
  if (sup_) return "sup";
  if (rho_ == static_cast<double>(static_cast<long>(rho_))) {
    return std::to_string(static_cast<long>(rho_));
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", rho_);
  return buf;
}

NormKind NormKind::from_name(const std::string& name) {
  if (name == "sup" || name == "inf") return sup();
  try {
    std::size_t pos = 0;
    const double rho = std::stod(name, &pos);
    if (pos == name.size()) return lp(rho);
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("NormKind: unrecognized norm '" + name + "'");
}

std::string normalizer_name(NormalizerKind kind) {
  return kind == NormalizerKind::kRandomColumnwise ? "random" : "sqrtn";
}

NormalizerKind normalizer_from_name(const std::string& name) {
  if (name == "random") return NormalizerKind::kRandomColumnwise;
  if (name == "sqrtn") return NormalizerKind::kSqrtN;
  throw std::invalid_argument("normalizer: unrecognized kind '" + name + "'");
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 1024) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

namespace {

// Column sums via recursive halving over rows: the same tree for any
// thread count, stable for tall samples.
void column_sums_rec(const std::vector<Row>& rows, std::size_t lo,
                     std::size_t hi, std::vector<double>& out) {
  if (hi - lo <= 1024) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Row& row = rows[i];
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j].observed) out[j] += row[j].value;
      }
    }
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> right(out.size(), 0.0);
  column_sums_rec(rows, lo, mid, out);
  column_sums_rec(rows, mid, hi, right);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += right[j];
}

}  // namespace

ColumnCounts column_counts(const TriangularSample& sample) {
  ColumnCounts result;
  result.counts.assign(static_cast<std::size_t>(sample.max_dim()), 0);
  for (const Row& row : sample.rows()) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j].observed) ++result.counts[j];
    }
  }
  for (long& c : result.counts) c = std::max(c, 1L);
  return result;
}

StatVector raw_sum(const TriangularSample& sample) {
  StatVector v;
  v.coords.assign(static_cast<std::size_t>(sample.max_dim()), 0.0);
  column_sums_rec(sample.rows(), 0, sample.rows().size(), v.coords);
  return v;
}

StatVector normalized_sum(const TriangularSample& sample,
                          NormalizerKind normalizer) {
  StatVector v = raw_sum(sample);
  if (normalizer == NormalizerKind::kSqrtN) {
    // Divide (not multiply by a reciprocal) so the two normalizers agree
    // bit-for-bit whenever every column count equals n.
    const double root_n = std::sqrt(static_cast<double>(sample.n()));
    for (double& x : v.coords) x /= root_n;
  } else {
    const ColumnCounts counts = column_counts(sample);
    for (std::size_t j = 0; j < v.coords.size(); ++j) {
      v.coords[j] /= std::sqrt(static_cast<double>(counts.counts[j]));
    }
  }
  return v;
}

StatVector mean_statistic(const TriangularSample& sample) {
  StatVector v = raw_sum(sample);
  const ColumnCounts counts = column_counts(sample);
  for (std::size_t j = 0; j < v.coords.size(); ++j) {
    v.coords[j] /= static_cast<double>(counts.counts[j]);
  }
  return v;
}

double norm(const StatVector& v, const NormKind& kind) {
  double peak = 0.0;
  for (double x : v.coords) peak = std::max(peak, std::abs(x));
  if (kind.is_sup() || peak == 0.0) return peak;

  // Factor out the peak so large exponents cannot overflow.
  std::vector<double> powers;
  powers.reserve(v.coords.size());
  const double rho = kind.rho();
  for (double x : v.coords) {
    powers.push_back(std::pow(std::abs(x) / peak, rho));
  }
  return peak * std::pow(pairwise_sum(powers), 1.0 / rho);
}

}  // namespace hdim
