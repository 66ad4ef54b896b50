#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "hdim/rng.hpp"
#include "hdim/sample.hpp"
#include "hdim/stats.hpp"

using namespace hdim;

namespace {

TriangularSample grid(std::vector<std::vector<std::optional<double>>> g) {
  return from_matrix(g);
}

}  // namespace

TEST_CASE("column counts floor empty columns at one") {
  // Column 2 exists only in row 1 and is unobserved there.
  TriangularSample s = grid({{1.0, 2.0, std::nullopt}, {3.0, 4.0, std::nullopt}});
  const ColumnCounts cc = column_counts(s);
  REQUIRE(cc.counts.size() == 3);
  CHECK(cc.counts[0] == 2);
  CHECK(cc.counts[1] == 2);
  CHECK(cc.counts[2] == 1);
}

TEST_CASE("raw sums ignore missing cells and jagged tails") {
  std::vector<Row> rows;
  rows.push_back(Row{Cell{1.0, true}});
  rows.push_back(Row{Cell{2.0, true}, Cell{-3.0, true}, Cell{4.0, true}});
  rows.push_back(Row{Cell{0.0, false}, Cell{5.0, true}});
  TriangularSample s(rows);
  const StatVector v = raw_sum(s);
  REQUIRE(v.coords.size() == 3);
  CHECK(v.coords[0] == 3.0);
  CHECK(v.coords[1] == 2.0);
  CHECK(v.coords[2] == 4.0);
}

TEST_CASE("columnwise normalization divides by sqrt of observed counts") {
  TriangularSample s = grid({{1.0, 1.0}, {3.0, -1.0}});
  const StatVector v = normalized_sum(s, NormalizerKind::kRandomColumnwise);
  REQUIRE(v.coords.size() == 2);
  CHECK(v.coords[0] == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(v.coords[0] == doctest::Approx(2.8284271247461903).epsilon(1e-15));
  CHECK(v.coords[1] == 0.0);
}

TEST_CASE("sqrt-n normalization is exactly raw / sqrt(n)") {
  std::vector<Row> rows;
  rows.push_back(Row{Cell{0.3, true}, Cell{-1.7, true}});
  rows.push_back(Row{Cell{2.9, true}});
  rows.push_back(Row{Cell{0.0, false}, Cell{4.2, true}, Cell{1.1, true}});
  TriangularSample s(rows);
  const StatVector raw = raw_sum(s);
  const StatVector v = normalized_sum(s, NormalizerKind::kSqrtN);
  const double root_n = std::sqrt(3.0);
  REQUIRE(v.coords.size() == raw.coords.size());
  for (std::size_t j = 0; j < v.coords.size(); ++j) {
    CHECK(v.coords[j] == raw.coords[j] / root_n);
  }
}

TEST_CASE("normalizers agree when every column is fully observed") {
  TriangularSample s = grid({{1.0, -2.0}, {0.5, 0.25}, {3.0, 1.0}});
  const StatVector a = normalized_sum(s, NormalizerKind::kRandomColumnwise);
  const StatVector b = normalized_sum(s, NormalizerKind::kSqrtN);
  REQUIRE(a.coords.size() == b.coords.size());
  for (std::size_t j = 0; j < a.coords.size(); ++j) {
    CHECK(a.coords[j] == b.coords[j]);  // same counts, bit-identical
  }
}

TEST_CASE("mean statistic divides by the floored counts") {
  TriangularSample s = grid({{2.0, -2.0}});
  const StatVector v = mean_statistic(s);
  CHECK(v.coords[0] == 2.0);
  CHECK(v.coords[1] == -2.0);

  TriangularSample t = grid({{4.0, std::nullopt}, {2.0, std::nullopt}});
  const StatVector w = mean_statistic(t);
  CHECK(w.coords[0] == 3.0);
  CHECK(w.coords[1] == 0.0);  // floored divisor keeps an empty column at 0
}

TEST_CASE("norm names round-trip") {
  CHECK(NormKind::sup().name() == "sup");
  CHECK(NormKind::lp(2.0).name() == "2");
  CHECK(NormKind::lp(2.5).name() == "2.5");
  CHECK(NormKind::from_name("sup") == NormKind::sup());
  CHECK(NormKind::from_name("4") == NormKind::lp(4.0));
  CHECK(NormKind::from_name("2.5") == NormKind::lp(2.5));
  CHECK_THROWS(NormKind::lp(1.5));
  CHECK_THROWS(NormKind::from_name("1"));
  CHECK_THROWS(NormKind::from_name("bogus"));
}

TEST_CASE("norm values on fixed vectors") {
  StatVector v{{3.0, -4.0}};
  CHECK(norm(v, NormKind::lp(2.0)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(norm(v, NormKind::sup()) == 4.0);
  StatVector w{{-7.0}};
  CHECK(norm(w, NormKind::lp(3.0)) == doctest::Approx(7.0).epsilon(1e-15));
  StatVector zero{{0.0, 0.0}};
  CHECK(norm(zero, NormKind::lp(2.0)) == 0.0);
  CHECK(norm(zero, NormKind::sup()) == 0.0);
  StatVector empty{{}};
  CHECK(norm(empty, NormKind::sup()) == 0.0);
  CHECK(norm(empty, NormKind::lp(2.0)) == 0.0);
}

TEST_CASE("l_rho norms decrease in rho and dominate the sup norm") {
  RngStream rng(11, StreamLabel::kMisc);
  for (int rep = 0; rep < 50; ++rep) {
    StatVector v;
    for (int j = 0; j < 8; ++j) v.coords.push_back(rng.normal());
    const double n2 = norm(v, NormKind::lp(2.0));
    const double n3 = norm(v, NormKind::lp(3.0));
    const double n6 = norm(v, NormKind::lp(6.0));
    const double ns = norm(v, NormKind::sup());
    CHECK(n2 >= n3 - 1e-12);
    CHECK(n3 >= n6 - 1e-12);
    CHECK(n6 >= ns - 1e-12);
  }
}

TEST_CASE("norms are absolutely homogeneous") {
  StatVector v{{0.1, -2.7, 3.14, 0.0, 5.5}};
  StatVector sv;
  for (double x : v.coords) sv.coords.push_back(-10.0 * x);
  for (const NormKind& k :
       {NormKind::lp(2.0), NormKind::lp(4.5), NormKind::sup()}) {
    CHECK(norm(sv, k) == doctest::Approx(10.0 * norm(v, k)).epsilon(1e-13));
  }
}

TEST_CASE("pairwise summation is exact on integers and stable on tenths") {
  std::vector<double> ints;
  for (int i = 1; i <= 1000; ++i) ints.push_back(static_cast<double>(i));
  CHECK(pairwise_sum(ints) == 500500.0);

  std::vector<double> tenths(100000, 0.1);
  CHECK(pairwise_sum(tenths) == doctest::Approx(10000.0).epsilon(1e-12));

  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(pairwise_sum(std::vector<double>{42.0}) == 42.0);
}
