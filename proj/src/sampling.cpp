#include "qbent/sampling.hpp"

#include <algorithm>
#include <functional>

#include "qbent/random.hpp"

namespace qbent {

double box_sup_norm(const SpaceSpec& x, VecView h) {
  if (h.size() != x.dim()) throw DimensionError("box dims");
  if (x.norm().is_monotone()) return x.eval(h);
  const double g = x.gamma().value();
  Vec e(x.dim(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (x.is_pinned(i) || h[i] == 0.0) continue;
    e[i] = h[i];
    acc += gpow(x.eval(e), g);
    e[i] = 0.0;
  }
  return gpow(acc, 1.0 / g);
}

bool box_meets_ball(const SpaceSpec& x, VecView c, VecView h) {
  const std::size_t n = x.dim();
  for (std::size_t i = 0; i < n; ++i)
    if (std::fabs(c[i]) - h[i] > 1.0 + 1e-12) return false;
  if (x.norm().is_monotone()) {
    Vec q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = std::max(0.0, std::fabs(c[i]) - h[i]);
    return x.eval(q) <= 1.0 + 1e-12;
  }
  const double g = x.gamma().value();
  return gpow(x.eval(c), g) - gpow(box_sup_norm(x, h), g) <= 1.0 + 1e-12;
}

double spacing_for_delta(const SpaceSpec& x, double delta) {
  if (!(delta > 0.0)) throw DomainError("net delta must be positive");
  Vec ones(x.dim(), 1.0);
  return 2.0 * delta / box_sup_norm(x, ones);
}

namespace {

// Depth-first walk over lattice points with prefix pruning. `emit` returns
// false to stop early.
void walk_lattice(const SpaceSpec& x, double h, const std::function<bool(VecView)>& emit) {
  const std::size_t n = x.dim();
  const long zmax = static_cast<long>(std::floor((1.0 + h / 2.0) / h));
  const bool monotone = x.norm().is_monotone();
  Vec point(n, 0.0), closest(n, 0.0), half(n, h / 2.0);
  bool stop = false;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (stop) return;
    if (i == n) {
      if (!monotone && !box_meets_ball(x, point, half)) return;
      if (!emit(point)) stop = true;
      return;
    }
    for (long z = -zmax; z <= zmax && !stop; ++z) {
      point[i] = static_cast<double>(z) * h;
      closest[i] = std::max(0.0, std::fabs(point[i]) - h / 2.0);
      if (monotone && x.eval(closest) > 1.0 + 1e-12) continue;
      rec(i + 1);
    }
    point[i] = 0.0;
    closest[i] = 0.0;
  };
  rec(0);
}

}  // namespace

std::size_t lattice_net_size(const SpaceSpec& x, double spacing, std::size_t cap) {
  std::size_t count = 0;
  walk_lattice(x, spacing, [&](VecView) { return ++count < cap; });
  return count;
}

LatticeNet lattice_net(const SpaceSpec& x, double spacing, std::size_t max_points) {
  if (!(spacing > 0.0)) throw DomainError("lattice spacing must be positive");
  LatticeNet net{PointCloud(x.dim()), spacing, 0.0};
  bool over = false;
  walk_lattice(x, spacing, [&](VecView p) {
    if (net.points.size() >= max_points) {
      over = true;
      return false;
    }
    net.points.push(p);
    return true;
  });
  if (over) throw BudgetError("lattice net exceeds " + std::to_string(max_points) + " points");
  Vec half(x.dim(), spacing / 2.0);
  net.delta = box_sup_norm(x, half);
  return net;
}

PointCloud source_cloud(const SpaceSpec& x, std::size_t count, std::uint64_t seed) {
  const std::size_t n = x.dim();
  PointCloud cloud(n);
  cloud.reserve(count);
  Vec v(n, 0.0);
  auto add = [&](bool normalise) {
    if (cloud.size() >= count) return;
    for (auto i : x.pinned()) v[i] = 0.0;
    const double nv = x.eval(v);
    if (nv <= 0.0) return;
    const double s = normalise || nv > 1.0 ? 1.0 / nv : 1.0;
    for (auto& c : v) c *= s;
    // Rounding can leave the norm a hair above 1; shrink until certified.
    while (x.eval(v) > 1.0)
      for (auto& c : v) c *= 1.0 - 1e-15;
    cloud.push(v);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (double sg : {1.0, -1.0}) {
      std::fill(v.begin(), v.end(), 0.0);
      v[i] = sg;
      add(true);
    }
  if (n <= 10) {
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      for (std::size_t i = 0; i < n; ++i) v[i] = (mask >> i) & 1ULL ? -1.0 : 1.0;
      add(true);
    }
  }
  if (n <= 16) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (double sg : {1.0, -1.0}) {
          std::fill(v.begin(), v.end(), 0.0);
          v[i] = 1.0;
          v[j] = sg;
          add(true);
          for (auto& c : v) c = -c;
          add(true);
        }
  }
  Rng rng(seed, 0x5eedULL);
  std::size_t guard = 0;
  while (cloud.size() < count && guard++ < 20 * count + 100) {
    std::fill(v.begin(), v.end(), 0.0);
    switch (guard % 4) {
      case 0:
        for (auto& c : v) c = rng.normal();
        break;
      case 1: {
        const std::size_t nz = 1 + rng.index(std::min<std::size_t>(n, 3));
        for (std::size_t j = 0; j < nz; ++j) v[rng.index(n)] = rng.normal();
        break;
      }
      case 2:
        for (auto& c : v) c = rng.sign() * -std::log(std::max(rng.uniform(), 1e-300));
        break;
      default:
        for (auto& c : v) c = rng.uniform(-1.0, 1.0);
        break;
    }
    const bool interior = guard % 8 == 7;
    const std::size_t before = cloud.size();
    add(!interior);
    if (interior && cloud.size() > before) {
      auto last = cloud.row(cloud.size() - 1);
      const double scale = std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
      for (auto& c : last) c *= scale;
    }
  }
  return cloud;
}

}  // namespace qbent
