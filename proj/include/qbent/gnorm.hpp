#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qbent/common.hpp"

namespace qbent {

enum class Family { LpGamma, Lorentz, Phi, Omega, Theta, Tau, Sup };

std::string family_name(Family f);

/// Immutable description of a γ-norm on R^dim. Children (Theta inner, Tau
/// outer and factors) are shared, so copies are cheap.
class NormSpec {
 public:
  static NormSpec lp(double p, std::size_t dim);
  static NormSpec sup(std::size_t dim);
  /// Lorentz ℓ_{p,r}; r may be +inf. The certified exponent defaults to
  /// min(p, r, 1)/2 and is checked by a randomized γ-triangle test here.
  static NormSpec lorentz(double p, double r, std::size_t dim, std::optional<double> gamma = std::nullopt);
  static NormSpec phi(GammaExponent g);
  static NormSpec omega(GammaExponent g);
  /// ϑ(ξ, x) = ω(|ξ|, ‖x‖) on R × X. X must be a normed space.
  static NormSpec theta(GammaExponent g, const NormSpec& inner);
  /// ‖(‖x_1‖, ..., ‖x_n‖)‖_E over a product of normed factors.
  static NormSpec tau(const NormSpec& outer, const std::vector<NormSpec>& factors);

  Family family() const { return family_; }
  std::size_t dim() const { return dim_; }
  GammaExponent certified_gamma() const { return gamma_; }
  // Family parameters. For Phi/Omega/Theta, p() is unused.
  double p() const { return p_; }
  double r() const { return r_; }
  const NormSpec& inner() const;
  const NormSpec& outer() const;
  std::vector<NormSpec> factors() const;

  // |x_i| <= |y_i| for all i implies ‖x‖ <= ‖y‖.
  bool is_monotone() const;
  // Invariant under coordinate sign flips.
  bool is_unconditional() const;
  // At least max_i |x_i|; true for every family implemented here, so the
  // unit ball always sits inside [-1, 1]^dim.
  bool dominates_sup() const { return true; }

  friend bool operator==(const NormSpec& a, const NormSpec& b);

 private:
  NormSpec() = default;
  Family family_ = Family::Sup;
  std::size_t dim_ = 1;
  GammaExponent gamma_{};
  double p_ = 0.0;
  double r_ = 0.0;
  std::shared_ptr<const std::vector<NormSpec>> children_;
};

double eval_norm(const NormSpec& spec, VecView v);

double phi_norm(GammaExponent g, double x1, double x2);
double omega_norm(GammaExponent g, double x1, double x2);
double theta_norm(GammaExponent g, double xi, double inner_norm_value);
double tau_product_norm(const NormSpec& outer, const std::vector<NormSpec>& factors, const std::vector<Vec>& x);
double lorentz_norm(double p, double r, VecView v);
Vec rearrange_decreasing(VecView v);

double gamma_triangle_residual(const NormSpec& spec, VecView x, VecView y);
GammaExponent aoki_rolewicz_gamma(double c);

/// Largest relative γ-triangle violation over `trials` structured and random
/// pairs: max of residual / max(‖x‖^γ, ‖y‖^γ, 1). Deterministic in seed.
double gamma_triangle_sweep(const NormSpec& spec, double gamma, std::size_t trials, std::uint64_t seed);

}  // namespace qbent
