#pragma once

#include <cstdint>
#include <vector>

#include "qbent/gnorm.hpp"

namespace qbent {

struct BasisFlags {
  bool claims_symmetric = false;
  bool claims_unconditional = false;
  friend bool operator==(const BasisFlags&, const BasisFlags&) = default;
};

/// A norm on R^n together with what is claimed about its standard basis.
/// Coordinates listed in `pinned` are fixed at zero: the space is the
/// subspace {x : x_i = 0 for i in pinned} with the restricted norm.
class SpaceSpec {
 public:
  SpaceSpec(NormSpec norm, BasisFlags flags, std::vector<std::size_t> pinned = {});

  static SpaceSpec lp(double p, std::size_t n);
  static SpaceSpec sup(std::size_t n);
  static SpaceSpec lorentz(double p, double r, std::size_t n);
  static SpaceSpec of(const NormSpec& norm);

  const NormSpec& norm() const { return norm_; }
  std::size_t dim() const { return norm_.dim(); }
  const BasisFlags& flags() const { return flags_; }
  const std::vector<std::size_t>& pinned() const { return pinned_; }
  bool is_pinned(std::size_t i) const;
  double eval(VecView v) const { return eval_norm(norm_, v); }
  /// γ for which the (restricted) norm is a γ-norm.
  GammaExponent gamma() const;

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;

 private:
  NormSpec norm_;
  BasisFlags flags_;
  std::vector<std::size_t> pinned_;
};

struct QBox {
  Vec lo;
  Vec hi;
};

double fundamental_function(const SpaceSpec& space, std::size_t m);
double check_symmetry(const SpaceSpec& space, std::size_t trials, std::uint64_t seed);
double check_unconditional(const SpaceSpec& space, std::size_t trials, std::uint64_t seed);
QBox q_box(VecView u, VecView v);

/// sup over a sample of Q_{u,v} of ‖x‖^γ minus ‖u‖^γ + ‖v‖^γ, with γ the
/// norm's certified exponent. In dim 2 the sample is a full grid with
/// grid_per_axis points per axis; otherwise the 2^n corners plus
/// `random_points` uniform points (seeded).
double q_gamma_residual(const SpaceSpec& e, VecView u, VecView v, std::size_t grid_per_axis = 201,
                        std::size_t random_points = 10000, std::uint64_t seed = 1);

/// Max of ‖·‖^γ over the two corners (M1 ± m1, M2 + m2) of a 2-D box.
double q_corner_max(const SpaceSpec& e, VecView u, VecView v);

}  // namespace qbent
