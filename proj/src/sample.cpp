#include "hdim/sample.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace hdim {

TriangularSample::TriangularSample(std::vector<Row> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) {
    throw std::invalid_argument("sample: needs at least one row");
  }
  for (auto& row : rows_) {
    if (row.empty()) {
      throw std::invalid_argument("sample: every row needs at least one cell");
    }
    max_dim_ = std::max(max_dim_, static_cast<int>(row.size()));
    for (auto& cell : row) {
      if (!cell.observed) cell.value = 0.0;
    }
  }
}

TriangularSample from_matrix(
    const std::vector<std::vector<std::optional<double>>>& values) {
  if (values.empty()) {
    throw std::invalid_argument("from_matrix: empty grid");
  }
  const std::size_t width = values.front().size();
  if (width == 0) {
    throw std::invalid_argument("from_matrix: rows need at least one cell");
  }
  std::vector<Row> rows;
  rows.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& in = values[i];
    if (in.size() != width) {
      throw std::invalid_argument("from_matrix: grid must be rectangular");
    }
    Row row(width);
    bool any_observed = false;
    for (std::size_t j = 0; j < width; ++j) {
      if (in[j].has_value()) {
        row[j] = Cell{*in[j], true};
        any_observed = true;
      }
    }
    if (!any_observed) {
      throw std::invalid_argument("from_matrix: row " + std::to_string(i + 1) +
                                  " has no observed entry");
    }
    rows.push_back(std::move(row));
  }
  return TriangularSample(std::move(rows));
}

TriangularSample center(const TriangularSample& sample,
                        std::span<const double> null_mean) {
  std::vector<Row> rows = sample.rows();
  for (auto& row : rows) {
    const std::size_t upto = std::min(row.size(), null_mean.size());
    for (std::size_t j = 0; j < upto; ++j) {
      if (row[j].observed) row[j].value -= null_mean[j];
    }
  }
  return TriangularSample(std::move(rows));
}

}  // namespace hdim
