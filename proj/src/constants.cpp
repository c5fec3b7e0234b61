#include "qbent/constants.hpp"

#include <algorithm>

namespace qbent {

bool AlphaBetaGamma::valid(double a, double b, GammaExponent g) {
  return g.value() < 1.0 && 1.0 < b && b < a && a < g.quasi_constant();
}

AlphaBetaGamma::AlphaBetaGamma(double a, double b, GammaExponent g) : alpha(a), beta(b), gamma(g) {
  if (!valid(a, b, g)) throw DomainError("need 0 < gamma < 1 < beta < alpha < 2^{1/gamma-1}");
}

double constant_A(const AlphaBetaGamma& p) {
  const double g = p.gamma.value(), c = p.gamma.quasi_constant();
  const double r = std::pow(p.beta / p.alpha, g);
  return 2.0 * r + (std::pow(c - p.alpha, g) + std::pow(c + p.alpha, g)) * (1.0 - r);
}

double constant_B(const AlphaBetaGamma& p) {
  return std::min(p.beta, std::pow(constant_A(p) / 2.0, 1.0 / p.gamma.value()));
}

double constant_C(const AlphaBetaGamma& p) { return std::exp2(1.0 - 1.0 / p.gamma.value()) * constant_B(p); }

double best_constant_C(GammaExponent g, int grid) {
  if (g.value() >= 1.0) throw DomainError("no valid (alpha, beta) at gamma = 1");
  const double c = g.quasi_constant();
  double best = 0.0;
  for (int i = 1; i < grid; ++i)
    for (int j = 1; j < i; ++j) {
      const double a = 1.0 + (c - 1.0) * i / grid, b = 1.0 + (c - 1.0) * j / grid;
      if (AlphaBetaGamma::valid(a, b, g)) best = std::max(best, constant_C({a, b, g}));
    }
  return best;
}

}  // namespace qbent
