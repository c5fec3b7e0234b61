#include "qbent/coverings.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "qbent/parallel.hpp"

namespace qbent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(const SpaceSpec& y, VecView a, VecView b, Vec& buf) {
  for (std::size_t i = 0; i < a.size(); ++i) buf[i] = a[i] - b[i];
  return y.eval(buf);
}

PointCloud images(const LinearOperator& t, const PointCloud& pts) {
  PointCloud out(t.target_dim());
  out.reserve(pts.size());
  Vec buf(t.target_dim());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    t.apply_into(pts.row(i), buf);
    out.push(buf);
  }
  return out;
}

std::size_t centers_for(int k) {
  if (k < 1 || k > 40) throw DomainError("entropy index k must be in [1, 40]");
  return std::size_t{1} << (k - 1);
}

double inflate(double eps, double spread, double g) {
  return gpow(gpow(eps, g) + gpow(spread, g), 1.0 / g);
}

}  // namespace

FarthestPoints farthest_point_order(const LinearOperator& t, const PointCloud& samples, std::size_t count,
                                    const SpaceSpec& metric) {
  if (metric.dim() != t.target_dim()) throw DimensionError("metric dim must match the target");
  FarthestPoints fp;
  const std::size_t m = samples.size();
  if (m == 0 || count == 0) return fp;
  count = std::min(count, m);
  const PointCloud img = images(t, samples);
  Vec dist(m, kInf);
  std::size_t next = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = metric.eval(img.row(i));
    if (v > best) {
      best = v;
      next = i;
    }
  }
  fp.order.push_back(next);
  fp.gap.push_back(kInf);
  while (fp.order.size() < count) {
    const std::size_t last = fp.order.back();
    parallel_for(m, [&](std::size_t i) {
      thread_local Vec buf;
      buf.resize(img.dim());
      dist[i] = std::min(dist[i], distance(metric, img.row(i), img.row(last), buf));
    });
    next = 0;
    best = -1.0;
    for (std::size_t i = 0; i < m; ++i)
      if (dist[i] > best) {
        best = dist[i];
        next = i;
      }
    fp.order.push_back(next);
    fp.gap.push_back(best);
  }
  return fp;
}

Packing greedy_packing(const LinearOperator& t, const PointCloud& samples, int k, const SpaceSpec& metric) {
  const std::size_t need = centers_for(k) + 1;
  if (samples.size() < need)
    throw DomainError("packing needs at least " + std::to_string(need) + " samples, got " + std::to_string(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (t.source().eval(samples.row(i)) > 1.0 + 1e-12) throw DomainError("packing sample outside the unit ball");
  const auto fp = farthest_point_order(t, samples, need, metric);
  Packing pk{PointCloud(samples.dim()), kInf, 0.0};
  for (auto i : fp.order) pk.witnesses.push(samples.row(i));
  const PointCloud img = images(t, pk.witnesses);
  Vec buf(img.dim());
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t j = i + 1; j < img.size(); ++j)
      pk.min_pairwise = std::min(pk.min_pairwise, distance(metric, img.row(i), img.row(j), buf));
  pk.f_lower = pk.min_pairwise / 2.0;
  return pk;
}

Packing greedy_packing(const LinearOperator& t, const PointCloud& samples, int k) {
  return greedy_packing(t, samples, k, t.target());
}

namespace {

struct CenterSearch {
  const SpaceSpec& y;
  const PointCloud& img;
  Vec buf;

  double worst(VecView c, const std::vector<std::size_t>& members) {
    double w = 0.0;
    for (auto i : members) w = std::max(w, distance(y, img.row(i), c, buf));
    return w;
  }

  // Coordinate pattern search on max distance to a small member subset.
  Vec refine(Vec c, const std::vector<std::size_t>& subset) {
    const std::size_t d = c.size();
    Vec lo(d, kInf), hi(d, -kInf);
    for (auto i : subset)
      for (std::size_t j = 0; j < d; ++j) {
        lo[j] = std::min(lo[j], img.row(i)[j]);
        hi[j] = std::max(hi[j], img.row(i)[j]);
      }
    double f = worst(c, subset);
    Vec mid(d);
    for (std::size_t j = 0; j < d; ++j) mid[j] = y.is_pinned(j) ? 0.0 : (lo[j] + hi[j]) / 2.0;
    if (const double fm = worst(mid, subset); fm < f) {
      f = fm;
      c = mid;
    }
    double step = f / 2.0;
    const double floor = 1e-9 * std::max(f, 1e-300);
    Vec trial(d);
    for (int it = 0; it < 40 && step > floor; ++it) {
      bool moved = false;
      for (std::size_t j = 0; j < d; ++j) {
        if (y.is_pinned(j)) continue;
        for (double sg : {1.0, -1.0}) {
          trial = c;
          trial[j] += sg * step;
          if (const double ft = worst(trial, subset); ft < f) {
            f = ft;
            c = trial;
            moved = true;
          }
        }
      }
      if (!moved) step /= 2.0;
    }
    return c;
  }
};

}  // namespace

Covering greedy_covering(const LinearOperator& t, const LatticeNet& net, int k, double op_norm_upper,
                         const PointCloud* seed_centers, const CoverOptions& opt) {
  if (net.points.empty()) throw DomainError("empty net");
  const std::size_t n_centers = centers_for(k);
  const auto& y = t.target();
  const std::size_t d = t.target_dim();
  Covering cov{PointCloud(d), 0.0, true, net.delta, 0.0, "net-greedy"};
  if (t.is_zero()) {
    cov.centers.push(Vec(d, 0.0));
    return cov;
  }
  const PointCloud img = images(t, net.points);
  const std::size_t m = img.size();
  Vec dist(m, kInf);
  std::vector<std::size_t> assign(m, 0);
  double evals = 0.0;
  auto absorb = [&](std::size_t c) {
    VecView center = cov.centers.row(c);
    parallel_for(m, [&](std::size_t i) {
      thread_local Vec buf;
      buf.resize(d);
      const double v = distance(y, img.row(i), center, buf);
      if (v < dist[i]) {
        dist[i] = v;
        assign[i] = c;
      }
    });
    evals += static_cast<double>(m);
  };
  if (seed_centers)
    for (std::size_t s = 0; s < seed_centers->size() && cov.centers.size() < n_centers; ++s) {
      cov.centers.push(seed_centers->row(s));
      absorb(cov.centers.size() - 1);
    }
  if (cov.centers.empty()) {
    std::size_t first = 0;
    double best = kInf;
    for (std::size_t i = 0; i < m; ++i)
      if (const double v = y.eval(img.row(i)); v < best) {
        best = v;
        first = i;
      }
    cov.centers.push(img.row(first));
    absorb(0);
  }
  while (cov.centers.size() < n_centers) {
    const auto it = std::max_element(dist.begin(), dist.end());
    if (*it <= 0.0) break;
    cov.centers.push(img.row(static_cast<std::size_t>(it - dist.begin())));
    absorb(cov.centers.size() - 1);
  }
  const std::size_t nc = cov.centers.size();
  CenterSearch search{y, img, Vec(d)};
  for (int round = 0; round < opt.rounds; ++round) {
    if (evals + static_cast<double>(m) * static_cast<double>(nc) > opt.max_distance_evals) break;
    std::vector<std::vector<std::size_t>> members(nc);
    for (std::size_t i = 0; i < m; ++i) members[assign[i]].push_back(i);
    bool improved = false;
    for (std::size_t c = 0; c < nc; ++c) {
      auto& mem = members[c];
      if (mem.size() < 2) continue;
      std::stable_sort(mem.begin(), mem.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
      const double current = dist[mem.front()];
      std::vector<std::size_t> subset(mem.begin(), mem.begin() + std::min<std::ptrdiff_t>(32, mem.size()));
      Vec cand(cov.centers.row(c).begin(), cov.centers.row(c).end());
      // Active set: refine on the subset, then add the members the candidate leaves farthest.
      for (int pass = 0; pass < 6; ++pass) {
        cand = search.refine(cand, subset);
        std::vector<std::pair<double, std::size_t>> far;
        far.reserve(mem.size());
        for (auto i : mem) far.emplace_back(distance(y, img.row(i), cand, search.buf), i);
        evals += static_cast<double>(mem.size());
        const std::size_t top = std::min<std::size_t>(16, far.size());
        std::partial_sort(far.begin(), far.begin() + static_cast<std::ptrdiff_t>(top), far.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
        if (far.front().first < current) {
          std::copy(cand.begin(), cand.end(), cov.centers.row(c).begin());
          improved = true;
          break;
        }
        for (std::size_t j = 0; j < top; ++j)
          if (std::find(subset.begin(), subset.end(), far[j].second) == subset.end()) subset.push_back(far[j].second);
      }
    }
    if (!improved) break;
    // Points keep a valid (if not nearest) center, then reassign to nearest.
    std::fill(dist.begin(), dist.end(), kInf);
    for (std::size_t c = 0; c < nc; ++c) absorb(c);
  }
  cov.pre_inflation = *std::max_element(dist.begin(), dist.end());
  Vec half(t.source_dim(), net.spacing / 2.0);
  const double spread = std::min(image_box_radius(t, half), op_norm_upper * net.delta);
  cov.radius = inflate(cov.pre_inflation, spread, y.gamma().value());
  return cov;
}

Covering segment_covering(const LinearOperator& t, int k) {
  if (t.source_dim() != 1) throw DimensionError("segment covering needs a one-dimensional source");
  const std::size_t n = centers_for(k);
  const double c = t.source().eval(Vec{1.0});
  const Vec v = t.column(0);
  Covering cov{PointCloud(t.target_dim()), 0.0, true, 0.0, 0.0, "segment"};
  Vec p(v.size());
  for (std::size_t j = 0; j < n; ++j) {
    const double s = (-1.0 + (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(n)) / c;
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = s * v[i];
    cov.centers.push(p);
  }
  cov.radius = t.target().eval(v) / (c * static_cast<double>(n));
  cov.pre_inflation = cov.radius;
  return cov;
}

namespace {

struct BoxTree {
  const LinearOperator& t;
  bool clip;
  std::size_t max_nodes;
  Vec col_norm;

  // Largest |x_i| allowed in B_X when every other coordinate sits at q_j.
  double extent(std::size_t i, Vec& q) const {
    const auto& x = t.source();
    const double saved = q[i];
    q[i] = 0.0;
    double s;
    if (x.norm().family() == Family::Sup) {
      s = x.eval(q) <= 1.0 ? 1.0 : -1.0;
    } else if (x.norm().family() == Family::LpGamma) {
      const double p = x.norm().p();
      const double rest = gpow(x.eval(q), p);
      s = rest <= 1.0 ? gpow(1.0 - rest, 1.0 / p) : -1.0;
    } else {
      double lo = 0.0, hi = 1.0;
      if (x.eval(q) > 1.0) {
        s = -1.0;
      } else {
        for (int it = 0; it < 60; ++it) {
          q[i] = (lo + hi) / 2.0;
          (x.eval(q) <= 1.0 ? lo : hi) = q[i];
        }
        s = hi;
      }
    }
    q[i] = saved;
    return s;
  }

  bool clip_box(Vec& c, Vec& h) const {
    const std::size_t n = c.size();
    Vec q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = std::max(0.0, std::fabs(c[i]) - h[i]);
    Vec lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = extent(i, q);
      if (s < 0.0) return false;
      lo[i] = std::max(c[i] - h[i], -s);
      hi[i] = std::min(c[i] + h[i], s);
      if (lo[i] > hi[i]) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = (lo[i] + hi[i]) / 2.0;
      h[i] = (hi[i] - lo[i]) / 2.0;
    }
    return true;
  }

  // Number of leaves with image radius <= r, or cap + 1 if more.
  std::size_t leaves(double r, std::size_t cap, std::vector<std::pair<Vec, double>>* out) const {
    const std::size_t n = t.source_dim();
    std::vector<std::pair<Vec, Vec>> stack{{Vec(n, 0.0), Vec(n, 1.0)}};
    std::size_t count = 0, nodes = 0;
    while (!stack.empty()) {
      auto [c, h] = std::move(stack.back());
      stack.pop_back();
      if (++nodes > max_nodes) return cap + 1;
      if (!box_meets_ball(t.source(), c, h)) continue;
      if (clip && !clip_box(c, h)) continue;
      const double rad = image_box_radius(t, h);
      if (rad <= r) {
        if (++count > cap) return count;
        if (out) out->emplace_back(std::move(c), rad);
        continue;
      }
      std::size_t axis = 0;
      for (std::size_t j = 1; j < n; ++j)
        if (h[j] * col_norm[j] > h[axis] * col_norm[axis]) axis = j;
      h[axis] /= 2.0;
      Vec c2 = c;
      c[axis] -= h[axis];
      c2[axis] += h[axis];
      stack.emplace_back(std::move(c2), h);
      stack.emplace_back(std::move(c), std::move(h));
    }
    return count;
  }
};

}  // namespace

Covering box_tree_covering(const LinearOperator& t, int k, bool clip, std::size_t max_nodes) {
  const std::size_t n_centers = centers_for(k);
  const std::size_t n = t.source_dim();
  clip = clip && t.source().norm().is_monotone();
  Covering cov{PointCloud(t.target_dim()), 0.0, true, 0.0, 0.0, clip ? "box-tree-clipped" : "box-tree"};
  BoxTree tree{t, clip, max_nodes, Vec(n)};
  for (std::size_t j = 0; j < n; ++j) tree.col_norm[j] = t.target().eval(t.column(j));
  double hi = image_box_radius(t, Vec(n, 1.0)) * (1.0 + 1e-12), lo = 0.0;
  if (n_centers > 1 && tree.leaves(lo, n_centers, nullptr) > n_centers) {
    for (int it = 0; it < 40; ++it) {
      const double mid = (lo + hi) / 2.0;
      (tree.leaves(mid, n_centers, nullptr) <= n_centers ? hi : lo) = mid;
    }
  } else if (n_centers > 1) {
    hi = lo;
  }
  std::vector<std::pair<Vec, double>> leaves;
  if (tree.leaves(hi, n_centers, &leaves) > n_centers || leaves.empty()) {
    // Fall back to the single enclosing box.
    leaves.clear();
    leaves.emplace_back(Vec(n, 0.0), image_box_radius(t, Vec(n, 1.0)));
  }
  for (const auto& [c, rad] : leaves) {
    cov.centers.push(t.apply(c));
    cov.radius = std::max(cov.radius, rad);
  }
  cov.pre_inflation = cov.radius;
  return cov;
}

namespace {

double lattice_points_l1(std::size_t n, int l) {
  // #{z in Z^n : ‖z‖_1 <= l} = Σ_j 2^j C(n,j) C(l,j).
  double total = 0.0;
  for (int j = 0; j <= std::min<int>(static_cast<int>(n), l); ++j) {
    double term = std::ldexp(1.0, j);
    for (int i = 0; i < j; ++i)
      term *= static_cast<double>(static_cast<int>(n) - i) / static_cast<double>(i + 1) * static_cast<double>(l - i);
    for (int i = 1; i <= j; ++i) term /= static_cast<double>(i);
    total += term;
  }
  return total;
}

}  // namespace

std::optional<Covering> empirical_covering(const LinearOperator& t, int k) {
  const auto& x = t.source().norm();
  const auto& y = t.target();
  if (x.family() != Family::LpGamma || x.p() > 1.0) return std::nullopt;
  if (y.norm().family() != Family::LpGamma || y.norm().p() != 2.0 || !y.pinned().empty()) return std::nullopt;
  const std::size_t n_centers = centers_for(k);
  const std::size_t n = t.source_dim();
  int l = 0;
  while (l < 64 && lattice_points_l1(n, l + 1) <= static_cast<double>(n_centers)) ++l;
  if (l == 0) return std::nullopt;
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) m = std::max(m, y.eval(t.column(j)));
  const double rl = std::sqrt(static_cast<double>(l));
  const double shrink = rl / (1.0 + rl) / static_cast<double>(l);
  Covering cov{PointCloud(t.target_dim()), m / (1.0 + rl), true, 0.0, 0.0, "empirical-l" + std::to_string(l)};
  Vec z(n, 0.0);
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i == n) {
      Vec pt(n);
      for (std::size_t j = 0; j < n; ++j) pt[j] = shrink * z[j];
      cov.centers.push(t.apply(pt));
      return;
    }
    for (int v = -left; v <= left; ++v) {
      z[i] = v;
      self(self, i + 1, left - std::abs(v));
    }
    z[i] = 0.0;
  };
  rec(rec, 0, l);
  cov.pre_inflation = cov.radius;
  return cov;
}

std::optional<Covering> structured_covering(const LinearOperator& t, int k) {
  const std::size_t n_centers = centers_for(k);
  const double s = t.scale();
  const std::size_t d = t.target_dim();
  Covering cov{PointCloud(d), 0.0, true, 0.0, 0.0, "structured"};
  Vec c(d, 0.0);
  const double half_step = 1.0 / (2.0 * static_cast<double>(n_centers));
  switch (t.form()) {
    case OperatorForm::TildeT:
    case OperatorForm::SharpT:
      // ω(1, ‖x‖) = 1 whenever ‖x‖ <= 1.
      c[0] = s;
      cov.centers.push(c);
      cov.radius = std::fabs(s);
      break;
    case OperatorForm::Tinf:
    case OperatorForm::T0: {
      // For x in B_{ℓ_1}, ‖x - t·1‖_∞ <= 1/2 at t = (Σx_+ - Σx_-)/2 ∈ [-1/2, 1/2];
      // N grid values of t put every x within 1/2 + 1/(2N).
      const bool tinf = t.form() == OperatorForm::Tinf;
      if (n_centers == 1) {
        if (tinf) c[0] = s;
        cov.centers.push(c);
        cov.radius = std::fabs(s) * (tinf ? 1.0 : t.params().gamma.quasi_constant());
        break;
      }
      const double rho = 0.5 + half_step;
      for (std::size_t j = 0; j < n_centers; ++j) {
        const double tj = -0.5 + (2.0 * static_cast<double>(j) + 1.0) * half_step;
        c[0] = tinf ? s * rho : 0.0;
        for (std::size_t i = 1; i < d; ++i) c[i] = s * tj;
        cov.centers.push(c);
      }
      cov.radius = std::fabs(s) * rho * (tinf ? 1.0 : t.params().gamma.quasi_constant());
      break;
    }
    default:
      return std::nullopt;
  }
  cov.pre_inflation = cov.radius;
  return cov;
}

double sampled_cover_radius(const LinearOperator& t, const Covering& c, const PointCloud& samples) {
  const PointCloud img = images(t, samples);
  Vec buf(t.target_dim());
  double worst = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    double best = kInf;
    for (std::size_t j = 0; j < c.centers.size(); ++j)
      best = std::min(best, distance(t.target(), img.row(i), c.centers.row(j), buf));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace qbent
