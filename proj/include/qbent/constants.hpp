#pragma once

#include "qbent/common.hpp"

namespace qbent {

/// Requires 0 < γ < 1 < β < α < 2^{1/γ-1}.
struct AlphaBetaGamma {
  double alpha;
  double beta;
  GammaExponent gamma;

  AlphaBetaGamma(double a, double b, GammaExponent g);
  static bool valid(double a, double b, GammaExponent g);
};

double constant_A(const AlphaBetaGamma& p);
double constant_B(const AlphaBetaGamma& p);
double constant_C(const AlphaBetaGamma& p);

/// Largest C(α, β, γ) over an interior grid of valid (α, β).
double best_constant_C(GammaExponent g, int grid = 64);

}  // namespace qbent
