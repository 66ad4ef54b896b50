#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "hdim/generate.hpp"
#include "hdim/rng.hpp"
#include "hdim/sample.hpp"
#include "hdim/testing.hpp"

using namespace hdim;

namespace {

TriangularSample gaussian_sample(std::uint64_t seed, int n, int dim,
                                 double shift = 0.0) {
  GenConfig cfg;
  cfg.n = n;
  cfg.tail = GaussianCoords{IdentityCov{dim}};
  cfg.row_law = FixedRows{dim};
  cfg.seed = seed;
  TriangularSample s = generate_sample(cfg);
  if (shift == 0.0) return s;
  std::vector<Row> rows = s.rows();
  for (Row& row : rows) {
    for (Cell& cell : row) {
      if (cell.observed) cell.value += shift;
    }
  }
  return TriangularSample(std::move(rows));
}

}  // namespace

TEST_CASE("data equal to the null mean gives a zero statistic and p = 1") {
  std::vector<Row> rows;
  for (int i = 0; i < 4; ++i) {
    rows.push_back(Row{Cell{1.5, true}, Cell{-2.0, true}});
  }
  TriangularSample s(rows);
  const std::vector<double> mean{1.5, -2.0};
  TestSpec spec;
  spec.seed = 3;
  const TestReport r = one_sample_test(s, mean, spec);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_FALSE(r.reject);
  CHECK(r.n_per_group == std::vector<int>{4});
  CHECK(r.dim == 2);
  CHECK(r.lambda_used.size() == 1);
}

TEST_CASE("a large shift is rejected at the smallest attainable p-value") {
  TriangularSample s = gaussian_sample(11, 20, 5, 4.0);
  TestSpec spec;
  spec.mc_draws = 400;
  spec.seed = 12;
  const std::vector<double> zero{};
  const TestReport r = one_sample_test(s, zero, spec);
  CHECK(r.reject);
  CHECK(r.statistic > r.critical_value);
  CHECK(r.p_value == doctest::Approx(1.0 / 401.0).epsilon(1e-15));
}

TEST_CASE("reports echo the requested settings and are reproducible") {
  TriangularSample s = gaussian_sample(21, 12, 4);
  TestSpec spec;
  spec.norm = NormKind::lp(2.0);
  spec.normalizer = NormalizerKind::kSqrtN;
  spec.alpha = 0.1;
  spec.mc_draws = 250;
  spec.bandwidth = 0.5;
  spec.target = CompoundSymmetricTarget{};
  spec.seed = 77;
  const std::vector<double> zero{};
  const TestReport a = one_sample_test(s, zero, spec);
  const TestReport b = one_sample_test(s, zero, spec);
  CHECK(a.statistic == b.statistic);
  CHECK(a.critical_value == b.critical_value);
  CHECK(a.p_value == b.p_value);
  CHECK(a.norm == NormKind::lp(2.0));
  CHECK(a.normalizer == NormalizerKind::kSqrtN);
  CHECK(a.alpha == 0.1);
  CHECK(a.mc_draws == 250);
  CHECK(a.bandwidth == 0.5);
  CHECK(a.seed == 77);

  TestSpec other = spec;
  other.threads = 4;
  const TestReport c = one_sample_test(s, zero, other);
  CHECK(a.critical_value == c.critical_value);
}

TEST_CASE("a lambda override is honored verbatim") {
  TriangularSample s = gaussian_sample(31, 10, 3);
  TestSpec spec;
  spec.lambda = 0.3;
  spec.mc_draws = 100;
  const std::vector<double> zero{};
  const TestReport r = one_sample_test(s, zero, spec);
  REQUIRE(r.lambda_used.size() == 1);
  CHECK(r.lambda_used[0] == 0.3);
}

TEST_CASE("invalid settings are rejected") {
  TriangularSample s = gaussian_sample(41, 6, 2);
  const std::vector<double> zero{};
  TestSpec bad_alpha;
  bad_alpha.alpha = 0.0;
  CHECK_THROWS(one_sample_test(s, zero, bad_alpha));
  TestSpec bad_lambda;
  bad_lambda.lambda = 1.5;
  CHECK_THROWS(one_sample_test(s, zero, bad_lambda));
  TestSpec bad_draws;
  bad_draws.mc_draws = 0;
  CHECK_THROWS(one_sample_test(s, zero, bad_draws));
}

TEST_CASE("identical groups give a zero two-sample statistic and p = 1") {
  TriangularSample s = gaussian_sample(51, 15, 4);
  TestSpec spec;
  spec.mc_draws = 300;
  spec.seed = 5;
  const TestReport r = two_sample_test(s, s, spec);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_FALSE(r.reject);
  CHECK(r.n_per_group == std::vector<int>{15, 15});
  CHECK(r.lambda_used.size() == 2);
}

TEST_CASE("a known group shift is detected") {
  TriangularSample a = gaussian_sample(61, 25, 6);
  TriangularSample b = gaussian_sample(62, 25, 6, 3.0);
  TestSpec spec;
  spec.mc_draws = 500;
  spec.seed = 8;
  const TestReport r = two_sample_test(a, b, spec);
  CHECK(r.reject);
  CHECK(r.p_value == doctest::Approx(1.0 / 501.0).epsilon(1e-15));
}

TEST_CASE("the two-sample statistic is symmetric under swapping groups") {
  TriangularSample a = gaussian_sample(71, 10, 3);
  TriangularSample b = gaussian_sample(72, 14, 5);
  TestSpec spec;
  spec.mc_draws = 200;
  const TestReport ab = two_sample_test(a, b, spec);
  const TestReport ba = two_sample_test(b, a, spec);
  CHECK(ab.statistic == ba.statistic);
  CHECK(ab.dim == 5);
  CHECK(ab.n_per_group == std::vector<int>{10, 14});
  CHECK(ba.n_per_group == std::vector<int>{14, 10});
}

TEST_CASE("pooled centering cancels a common location shift") {
  TriangularSample a = gaussian_sample(81, 12, 4);
  TriangularSample b = gaussian_sample(82, 12, 4);
  TriangularSample a_shift = gaussian_sample(81, 12, 4, 10.0);
  TriangularSample b_shift = gaussian_sample(82, 12, 4, 10.0);
  TestSpec spec;
  spec.mc_draws = 200;
  const TestReport base =
      two_sample_test(a, b, spec, TwoSampleCentering::kPooledCenter);
  const TestReport shifted =
      two_sample_test(a_shift, b_shift, spec, TwoSampleCentering::kPooledCenter);
  // The statistic compares the groups to each other, so a common shift
  // moves only the pooled mean, not the difference.
  CHECK(base.statistic == doctest::Approx(shifted.statistic).epsilon(1e-9));
  CHECK(base.p_value == doctest::Approx(shifted.p_value).epsilon(0.05));
}

TEST_CASE("a centering profile cannot be combined with pooled centering") {
  TriangularSample a = gaussian_sample(91, 8, 3);
  TestSpec spec;
  spec.mc_draws = 50;
  const std::vector<double> profile{1.0, 0.0, 0.0};
  CHECK_THROWS(two_sample_test(a, a, spec, TwoSampleCentering::kPooledCenter,
                               profile));
  // A profile with the specified-profile mode is fine.
  const TestReport r = two_sample_test(
      a, a, spec, TwoSampleCentering::kSpecifiedProfile, profile);
  CHECK(r.statistic == 0.0);
}

TEST_CASE("the exported null distribution matches the report") {
  TriangularSample s = gaussian_sample(95, 10, 3);
  TestSpec spec;
  spec.mc_draws = 150;
  spec.seed = 4;
  NullDistribution nd;
  const std::vector<double> zero{};
  const TestReport r = one_sample_test(s, zero, spec, &nd);
  CHECK(nd.t() == 150);
  CHECK(critical_value(nd, spec.alpha) == r.critical_value);
  CHECK(p_value(nd, r.statistic) == r.p_value);
}

TEST_CASE("limit covariances scale with the observation probability") {
  const CompoundSymmetricCov cs{3, 1.0, 0.3};
  const Eigen::MatrixXd g1 = GammaLimit{cs, 0.8, 1}.matrix();
  CHECK(g1(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g1(0, 1) == doctest::Approx(0.24).epsilon(1e-15));

  const Eigen::MatrixXd g2 = GammaLimit{cs, 0.8, 2}.matrix();
  CHECK(g2(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(g2(0, 1) == doctest::Approx(0.192).epsilon(1e-15));

  const Eigen::MatrixXd full1 = GammaLimit{cs, 1.0, 1}.matrix();
  const Eigen::MatrixXd full2 = GammaLimit{cs, 1.0, 2}.matrix();
  CHECK((full1 - full2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((full1 - materialize(CovarianceStructure{cs})).cwiseAbs().maxCoeff() ==
        0.0);

  CHECK_THROWS(GammaLimit{cs, 0.8, 3}.matrix());
  CHECK_THROWS(GammaLimit{cs, 0.0, 1}.matrix());
}
