#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hdim/parallel.hpp"
#include "hdim/rng.hpp"

using namespace hdim;

TEST_CASE("streams are deterministic and keyed") {
  RngStream a(42, StreamLabel::kCellValue, 7);
  RngStream b(42, StreamLabel::kCellValue, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, StreamLabel::kCellValue, 8);
  RngStream d(42, StreamLabel::kObservedFlag, 7);
  RngStream e(43, StreamLabel::kCellValue, 7);
  RngStream base(42, StreamLabel::kCellValue, 7);
  const std::uint64_t first = base.next_u64();
  CHECK(c.next_u64() != first);
  CHECK(d.next_u64() != first);
  CHECK(e.next_u64() != first);
}

TEST_CASE("uniform01 stays inside the open unit interval") {
  RngStream rng(1, StreamLabel::kMisc);
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform(a, b) respects its range and mean") {
  RngStream rng(2, StreamLabel::kMisc);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(-2.0, 6.0);
    CHECK(u >= -2.0);
    CHECK(u <= 6.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("normal draws match first and second moments") {
  RngStream rng(3, StreamLabel::kMisc);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0, sumabs = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sumsq += z * z;
    sumabs += std::abs(z);
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.01));
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
  // E|Z| = sqrt(2/pi) for a standard normal.
  CHECK(sumabs / n ==
        doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(0.01));
}

TEST_CASE("normal(mean, sd) rescales") {
  RngStream rng(4, StreamLabel::kMisc);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal(5.0, 3.0);
    sum += z;
    sumsq += (z - 5.0) * (z - 5.0);
  }
  CHECK(sum / n == doctest::Approx(5.0).epsilon(0.01));
  CHECK(sumsq / n == doctest::Approx(9.0).epsilon(0.03));
}

TEST_CASE("exponential has unit mean") {
  RngStream rng(5, StreamLabel::kMisc);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.exponential();
    CHECK(x >= 0.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("bernoulli frequency tracks p") {
  RngStream rng(6, StreamLabel::kMisc);
  const int n = 100000;
  long hits = 0;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
  CHECK(static_cast<double>(hits) / n == doctest::Approx(0.3).epsilon(0.03));
  RngStream rng2(6, StreamLabel::kMisc, 1);
  CHECK_FALSE(rng2.bernoulli(0.0));
  CHECK(rng2.bernoulli(1.0));
}

TEST_CASE("poisson means are right in both regimes") {
  RngStream rng(7, StreamLabel::kMisc);
  const int n = 40000;
  double small_sum = 0.0, big_sum = 0.0;
  for (int i = 0; i < n; ++i) small_sum += static_cast<double>(rng.poisson(3.0));
  for (int i = 0; i < 2000; ++i) big_sum += static_cast<double>(rng.poisson(700.0));
  CHECK(small_sum / n == doctest::Approx(3.0).epsilon(0.02));
  CHECK(big_sum / 2000 == doctest::Approx(700.0).epsilon(0.01));
  CHECK_THROWS(rng.poisson(-1.0));
  CHECK_THROWS(rng.poisson(2e6));
}

TEST_CASE("parallel_for results do not depend on thread count") {
  const std::int64_t count = 1000;
  std::vector<double> one(count, 0.0), four(count, 0.0);
  parallel_for(count, 1, [&](std::int64_t i) {
    one[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(i) + 1);
  });
  parallel_for(count, 4, [&](std::int64_t i) {
    four[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(i) + 1);
  });
  CHECK(one == four);

  bool ran = false;
  parallel_for(0, 4, [&](std::int64_t) { ran = true; });
  CHECK_FALSE(ran);
  parallel_for(1, 8, [&](std::int64_t i) { CHECK(i == 0); });
}
