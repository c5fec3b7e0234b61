#pragma once

#include <optional>
#include <string>

#include "qbent/operators.hpp"
#include "qbent/sampling.hpp"

namespace qbent {

struct Packing {
  PointCloud witnesses;  // source points, each in B_X
  double min_pairwise = 0.0;
  double f_lower = 0.0;
};

struct Covering {
  PointCloud centers;  // target points
  double radius = 0.0;  // certified radius for all of T(B_X)
  bool certified = false;
  double net_delta = 0.0;
  double pre_inflation = 0.0;  // radius over the net alone
  std::string method;
};

/// Farthest-point order over the images of `samples` in `metric`; entry i of
/// `gap` is the distance of the i-th chosen point to the ones before it. The
/// first point is the sample with the largest image norm.
struct FarthestPoints {
  std::vector<std::size_t> order;
  std::vector<double> gap;
};
FarthestPoints farthest_point_order(const LinearOperator& t, const PointCloud& samples, std::size_t count,
                                    const SpaceSpec& metric);

Packing greedy_packing(const LinearOperator& t, const PointCloud& samples, int k, const SpaceSpec& metric);
Packing greedy_packing(const LinearOperator& t, const PointCloud& samples, int k);

struct CoverOptions {
  int rounds = 20;
  double max_distance_evals = 3e8;
};

/// Greedy k-center over the image of a lattice net, then local center
/// refinement, then inflation by the net's image spread.
Covering greedy_covering(const LinearOperator& t, const LatticeNet& net, int k, double op_norm_upper,
                         const PointCloud* seed_centers = nullptr, const CoverOptions& opt = {});

/// Source dim 1: equally spaced centers on the image segment.
Covering segment_covering(const LinearOperator& t, int k);

/// Adaptive dyadic boxes over [-1,1]^n, split along the axis with the widest
/// image, pruned against B_X; the radius target is bisected until at most
/// 2^{k-1} boxes remain. With `clip`, monotone sources shrink each box to
/// the coordinate range B_X allows.
Covering box_tree_covering(const LinearOperator& t, int k, bool clip, std::size_t max_nodes = 4000000);

/// Source ℓ_p, p <= 1, into ℓ_2: centers t·T(z/L) for integer z with
/// ‖z‖_1 <= L. Averaging L random signed columns gives
/// radius <= max_j ‖Te_j‖ / (1 + √L).
std::optional<Covering> empirical_covering(const LinearOperator& t, int k);

/// Closed-form coverings of the structured operators.
std::optional<Covering> structured_covering(const LinearOperator& t, int k);

/// Largest distance from a sampled point of B_X to its nearest center;
/// used by tests to sanity-check certificates from below.
double sampled_cover_radius(const LinearOperator& t, const Covering& c, const PointCloud& samples);

}  // namespace qbent
