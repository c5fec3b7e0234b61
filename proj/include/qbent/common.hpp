#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbent {

using Vec = std::vector<double>;
using VecView = std::span<const double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kZeroGuard = 1e-300;

// t^e for t >= 0, via exp/log so that every family shares one rounding path.
inline double gpow(double t, double e) {
  if (t < kZeroGuard) return 0.0;
  if (e == 1.0) return t;
  return std::pow(t, e);
}

inline void require_finite(VecView v) {
  for (double c : v)
    if (!std::isfinite(c)) throw DomainError("non-finite coordinate");
}

class GammaExponent {
 public:
  constexpr GammaExponent() = default;
  explicit GammaExponent(double g) : g_(g) {
    if (!(g > 0.0 && g <= 1.0)) throw DomainError("gamma must lie in (0, 1], got " + std::to_string(g));
  }
  constexpr double value() const { return g_; }
  // 2^{1/γ - 1}, the Aoki-Rolewicz constant of a γ-norm.
  double quasi_constant() const { return std::exp2(1.0 / g_ - 1.0); }

  friend bool operator==(GammaExponent, GammaExponent) = default;

 private:
  double g_ = 1.0;
};

// SplitMix64 mixing; used to derive independent per-task seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qbent
