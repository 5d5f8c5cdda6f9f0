#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "uasd/types.hpp"

namespace uasd {

/// Counter-based generator: every value is a pure function of
/// (seed, stream, counter), so parallel Monte-Carlo trials are reproducible
/// by (seed, trial-index) regardless of evaluation order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t nextU64() {
    return mix(seed_ ^ mix(stream_ + 0x9e3779b97f4a7c15ull) ^
               mix(counter_++ * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull));
  }

  /// uniform in (0, 1]
  double nextUniform() {
    return (static_cast<double>(nextU64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// circularly symmetric complex Gaussian, unit variance (re/im ~ N(0, 1/2))
  Complex nextCn() {
    double u1 = nextUniform();
    double u2 = nextUniform();
    double r = std::sqrt(-std::log(u1));
    double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  /// real standard normal
  double nextNormal() {
    double u1 = nextUniform();
    double u2 = nextUniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  MatrixXcd gaussianMatrix(int rows, int cols) {
    MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = nextCn();
    return m;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace uasd
