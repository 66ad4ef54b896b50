#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace hdim {

// SplitMix64 finalizer: full-avalanche 64-bit mixing.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Labels naming the independent sub-streams derived from one master seed.
enum class StreamLabel : std::uint64_t {
  kRowLength = 1,
  kCellValue = 2,
  kObservedFlag = 3,
  kPlateEffect = 4,
  kNoise = 5,
  kMcDraw = 6,
  kTrial = 7,
  kMisc = 8,
};

// Key of the (label, index) sub-stream of `seed`. Every consumer of
// randomness owns such a stream, keyed by what it is for and which
// row/draw/trial it belongs to, so results never depend on how work is
// split across threads.
inline std::uint64_t derive_key(std::uint64_t seed, StreamLabel label,
                                std::uint64_t index = 0) {
  constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t h = mix64(seed + kGamma);
  h = mix64(h ^ (static_cast<std::uint64_t>(label) * kGamma + 1));
  h = mix64(h ^ (index * kGamma + 1));
  return h;
}

// Counter-based SplitMix64 generator. Construction is two multiplies, so
// per-row and per-draw streams are derived freely.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}
  RngStream(std::uint64_t seed, StreamLabel label, std::uint64_t index = 0)
      : state_(derive_key(seed, label, index)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard exponential (rate 1).
  double exponential() { return -std::log(uniform01()); }

  // Standard normal via Box-Muller; the paired variate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Knuth's product method, chunked so that large means stay in exp()'s
  // range. Cost grows linearly with the mean.
  long poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean)) {
      throw std::invalid_argument("poisson: mean must be finite and >= 0");
    }
    if (mean > 1e6) {
      throw std::invalid_argument("poisson: mean too large");
    }
    long total = 0;
    while (mean > 0.0) {
      const double step = mean > 50.0 ? 50.0 : mean;
      mean -= step;
      const double limit = std::exp(-step);
      double prod = uniform01();
      while (prod > limit) {
        ++total;
        prod *= uniform01();
      }
    }
    return total;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hdim
