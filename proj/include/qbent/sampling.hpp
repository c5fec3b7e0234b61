#pragma once

#include <cstdint>

#include "qbent/spaces.hpp"

namespace qbent {

/// Row-major set of points in R^dim.
class PointCloud {
 public:
  explicit PointCloud(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ ? data_.size() / dim_ : 0; }
  bool empty() const { return data_.empty(); }
  VecView row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  void push(VecView v) {
    if (v.size() != dim_) throw DimensionError("point dim mismatch");
    data_.insert(data_.end(), v.begin(), v.end());
  }
  void reserve(std::size_t n) { data_.reserve(n * dim_); }

 private:
  std::size_t dim_;
  Vec data_;
};

/// A lattice hZ^n restricted to points whose cube cell (half-width h/2)
/// can meet B_X. Every x in B_X lies in the cell of some point, so the
/// points form a δ-net with δ = sup of ‖t‖_X over the cell offsets.
struct LatticeNet {
  PointCloud points;
  double spacing = 0.0;
  double delta = 0.0;  // in the source quasi-norm
};

LatticeNet lattice_net(const SpaceSpec& x, double spacing, std::size_t max_points);
/// Count the lattice points lattice_net would produce, stopping at `cap`.
std::size_t lattice_net_size(const SpaceSpec& x, double spacing, std::size_t cap);
/// Lattice spacing whose source-metric δ equals `delta`.
double spacing_for_delta(const SpaceSpec& x, double delta);

/// sup ‖t‖ over the zero-centred box |t_i| <= h_i.
double box_sup_norm(const SpaceSpec& x, VecView h);
/// False only if the box c + [-h, h] provably misses the closed unit ball.
bool box_meets_ball(const SpaceSpec& x, VecView c, VecView h);

/// Points of the unit sphere (and some interior points) of X: signed
/// basis vectors, flat sign vectors, sparse and dense random directions.
/// Every point is rescaled to norm <= 1.
PointCloud source_cloud(const SpaceSpec& x, std::size_t count, std::uint64_t seed);

}  // namespace qbent
