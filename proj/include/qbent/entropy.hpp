#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbent/coverings.hpp"
#include "qbent/operators.hpp"

namespace qbent {

struct EntropyBounds {
  int k = 1;
  double f_lower = 0.0;
  double e_lower = 0.0;
  double e_upper = 0.0;
  std::string f_method;
  std::string lower_method;
  std::string upper_method;
};

struct EstimatorBudget {
  std::size_t samples = 200000;       // packing cloud
  std::size_t max_packing = 4097;     // farthest-point prefix cap; larger k get no packing
  double max_packing_evals = 2e8;     // samples x prefix length
  double net_delta = 0.02;            // source δ of the covering net
  std::size_t net_points = 200000;
  std::size_t max_net_dim = 6;
  std::size_t max_box_dim = 8;
  std::size_t box_nodes = 4000000;
  CoverOptions cover{};
  NormBudget norm{};
};

struct EntropyTable {
  std::vector<EntropyBounds> rows;  // k = 1..k_max
  OperatorNormEstimate norm;
  double gamma = 1.0;  // effective γ of the target
};

/// Certified bounds for k = 1..k_max, after the monotone hull.
EntropyTable entropy_bounds_table(const LinearOperator& t, int k_max, const EstimatorBudget& budget,
                                  std::uint64_t seed);
EntropyBounds entropy_bounds(const LinearOperator& t, int k, const EstimatorBudget& budget, std::uint64_t seed);

/// e_1 >= 2^{1-1/γ}‖T‖: a single ball holding Tx and -Tx has radius >= 2^{-1/γ}‖2Tx‖.
double symmetry_e1_lower(double op_norm_lower, GammaExponent g);
/// Covering the image of one segment: e_k >= 2^{2-k-1/γ}·‖T‖.
double segment_lower(double op_norm_lower, GammaExponent g, int k);

/// C(α, β, γ)·‖Tx‖ for a unit x; the target must be ℓ_γ with the same γ.
double three_point_e1_lower(const LinearOperator& t, VecView x, double alpha, double beta, GammaExponent g);

/// Volume comparison for square invertible maps between ℓ_p / sup spaces:
/// N ε^n vol(B_Y) >= |det T| vol(B_X). Empty when volumes are unavailable.
std::optional<double> volumetric_lower(const LinearOperator& t, int k);

/// e_k(I_Z) on an n-dimensional γ-normed Z: the volume bound 2^{(1-k)/n}, and
/// for 2^{k-1} <= n the antipodal bound 2^{1-1/γ} (n closed sets covering the
/// sphere put an antipodal pair in one of them).
double identity_lower(std::size_t n, GammaExponent g, int k);

/// Through a left inverse P with PT = I_Z: e_k(T) >= e_k(I_Z)/‖P‖.
std::optional<double> left_inverse_lower(const LinearOperator& t, int k);

struct TheoryBand {
  double lower = 0.0;
  double upper = 0.0;
  std::string source;
};

TheoryBand identity_band(std::size_t n, GammaExponent g, int k);
/// [c1, c2]·2^{-k/n}·φ_Y(n)/φ_X(n) for k >= n.
TheoryBand embedding_band(const SpaceSpec& x, const SpaceSpec& y, int k, double c1, double c2);
double psi(int k, int n, double p, double q);

struct InequalityReport {
  double lhs = 0.0;  // certified lower bound of the smaller side
  double rhs = 0.0;  // certified upper bound of the larger side
  double margin = 0.0;
  bool pass = false;
};

/// e_{k1+k2-1}(RS) <= e_{k1}(R)·e_{k2}(S).
InequalityReport check_product_subadditivity(const LinearOperator& r, const LinearOperator& s, int k1, int k2,
                                             const EstimatorBudget& budget, std::uint64_t seed);
/// e_{k1+k2-1}(T1+T2)^γ <= e_{k1}(T1)^γ + e_{k2}(T2)^γ.
InequalityReport check_sum_subadditivity(const LinearOperator& t1, const LinearOperator& t2, int k1, int k2,
                                         const EstimatorBudget& budget, std::uint64_t seed);

struct IntervalPair {
  EntropyBounds a;
  EntropyBounds b;
  bool overlap = false;
};

/// Bounds for T∘ς and T; ς must map B onto B (checked on the signed basis).
IntervalPair surjection_invariance_check(const LinearOperator& t, const LinearOperator& surj, int k,
                                         const EstimatorBudget& budget, std::uint64_t seed);

}  // namespace qbent
