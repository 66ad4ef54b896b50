#pragma once

#include <optional>
#include <span>
#include <vector>

namespace hdim {

// One entry of a replicate row. A cell exists for every column up to the
// row's length; `observed` is false when the value is missing. Unobserved
// cells carry value 0 and are ignored by every downstream computation.
struct Cell {
  double value = 0.0;
  bool observed = false;
};

using Row = std::vector<Cell>;

// A jagged sample: n rows whose lengths may differ. Row i has cells for
// columns 0 .. length_i - 1 and simply does not extend further. Immutable
// after construction.
class TriangularSample {
 public:
  explicit TriangularSample(std::vector<Row> rows);

  int n() const { return static_cast<int>(rows_.size()); }
  int max_dim() const { return max_dim_; }
  const Row& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::vector<Row> rows_;
  int max_dim_ = 0;
};

// Builds a sample from a rectangular grid with optional entries. Absent
// entries become unobserved cells (missing data), not shorter rows, so
// every row keeps the grid's width as its length. A row with no observed
// entry is rejected.
TriangularSample from_matrix(
    const std::vector<std::vector<std::optional<double>>>& values);

// Subtracts null_mean[j] from every observed cell of column j. Entries of
// null_mean beyond its length count as zero; unobserved cells are left
// untouched.
TriangularSample center(const TriangularSample& sample,
                        std::span<const double> null_mean);

}  // namespace hdim
