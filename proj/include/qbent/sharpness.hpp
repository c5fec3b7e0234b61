#pragma once

#include <string>
#include <vector>

#include "qbent/constants.hpp"
#include "qbent/entropy.hpp"

namespace qbent {

struct SharpnessReport {
  std::string claim;
  int k = 1;
  double f_lower = 0.0;
  double measured_lower = 0.0;
  double measured_upper = 0.0;
  double target_lower = 0.0;
  double target_upper = 0.0;
  bool pass = false;
  double margin = 0.0;  // smallest slack of the pass condition; negative on failure
  std::string method;
};

inline constexpr double kSharpTolK1 = 0.02;
inline constexpr double kSharpTolK = 0.05;

/// Σ_i |c x_i - y_i|^γ + |c x_i + y_i|^γ - A with c = 2^{1/γ-1}.
double pair_residual(VecView x, VecView y, const AlphaBetaGamma& p);
/// Smallest pair_residual residual over random pairs: a third with y_i = αx_i
/// on a random subset, the rest with ‖y‖ uniform in [0, β].
double pair_residual_sweep(const AlphaBetaGamma& p, std::size_t pairs, std::uint64_t seed);

struct GMonotone {
  double increase = 0.0;  // max g(t2) - g(t1) over grid points t1 < t2 in [0, a]
  double odd_part = 0.0;  // max |g(t) - g(-t)|
};
/// g_a(t) = (a - t)^γ + (a + t)^γ on a uniform grid.
GMonotone g_monotone_residual(double a, GammaExponent g, std::size_t grid);

SharpnessReport verify_packing_constant(GammaExponent g, int k, std::size_t m);
SharpnessReport verify_segment_cover(GammaExponent g, double net_delta);
std::vector<SharpnessReport> verify_sharp_t(GammaExponent g, double p, std::size_t m, int k_max,
                                          const EstimatorBudget& budget, std::uint64_t seed);
/// Rows: injection-tinf, injection-t0, injection-ratio.
std::vector<SharpnessReport> verify_injection_sections(GammaExponent g, std::size_t m, int k, const EstimatorBudget& budget,
                                               std::uint64_t seed);
/// ι must preserve the norm of T's target (checked on samples).
std::vector<SharpnessReport> verify_metric_injection(const LinearOperator& t, const LinearOperator& iota, int k,
                                                   const EstimatorBudget& budget, std::uint64_t seed);

}  // namespace qbent
