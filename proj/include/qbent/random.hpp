#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "qbent/common.hpp"

namespace qbent {

// mt19937_64 with hand-written transforms: the standard distributions are
// implementation-defined, which would break byte-identical output across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : eng_(mix_seed(seed, stream)) {}

  std::uint64_t bits() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
  double sign() { return (eng_() >> 63) ? 1.0 : -1.0; }
  double normal() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * uniform());
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qbent
