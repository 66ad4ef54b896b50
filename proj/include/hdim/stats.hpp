#pragma once

#include <span>
#include <string>
#include <vector>

#include "hdim/sample.hpp"

namespace hdim {

// Finite coordinate vector; coordinates beyond coords.size() are
// implicitly zero (embedding into sequences vanishing at infinity).
struct StatVector {
  std::vector<double> coords;
};

// Per-column effective sample sizes, floored at 1.
struct ColumnCounts {
  std::vector<long> counts;
};

// Which norm to apply to a StatVector: l_rho for rho >= 2, or sup.
class NormKind {
 public:
  static NormKind lp(double rho);
  static NormKind sup() { return NormKind(true, 0.0); }

  bool is_sup() const { return sup_; }
  double rho() const { return rho_; }  // meaningful only when !is_sup()

  // "2", "4", "2.5", or "sup"; used in reports and CLI flags.
  std::string name() const;
  static NormKind from_name(const std::string& name);

  bool operator==(const NormKind& o) const {
    return sup_ == o.sup_ && rho_ == o.rho_;
  }

 private:
  NormKind(bool sup, double rho) : sup_(sup), rho_(rho) {}
  bool sup_;
  double rho_;
};

// How column sums are normalized: by the square root of the per-column
// observed count, or by sqrt(n).
enum class NormalizerKind { kRandomColumnwise, kSqrtN };

std::string normalizer_name(NormalizerKind kind);
NormalizerKind normalizer_from_name(const std::string& name);

// counts[j] = max(1, #observed cells in column j); length = max_dim.
ColumnCounts column_counts(const TriangularSample& sample);

// coord j = sum of observed values in column j.
StatVector raw_sum(const TriangularSample& sample);

// coord j = column sum / sqrt(count_j) or column sum / sqrt(n).
StatVector normalized_sum(const TriangularSample& sample,
                          NormalizerKind normalizer);

// coord j = column sum / count_j (column means with the count floor).
StatVector mean_statistic(const TriangularSample& sample);

double norm(const StatVector& v, const NormKind& kind);

// Tree summation; exact order independent of threading, stable to ~1e-12
// for desk-scale inputs.
double pairwise_sum(std::span<const double> x);

}  // namespace hdim
