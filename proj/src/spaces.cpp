#include "qbent/spaces.hpp"

#include <algorithm>
#include <numeric>

#include "qbent/random.hpp"

namespace qbent {

SpaceSpec::SpaceSpec(NormSpec norm, BasisFlags flags, std::vector<std::size_t> pinned)
    : norm_(std::move(norm)), flags_(flags), pinned_(std::move(pinned)) {
  std::sort(pinned_.begin(), pinned_.end());
  pinned_.erase(std::unique(pinned_.begin(), pinned_.end()), pinned_.end());
  for (auto i : pinned_)
    if (i >= norm_.dim()) throw DimensionError("pinned coordinate out of range");
  if (pinned_.size() >= norm_.dim()) throw DimensionError("cannot pin every coordinate");
  if (flags_.claims_symmetric) {
    Vec e(dim(), 0.0);
    for (std::size_t i = 0; i < dim(); ++i) {
      e[i] = 1.0;
      if (std::fabs(eval(e) - 1.0) > 1e-12) throw DomainError("symmetric basis must be normalised");
      e[i] = 0.0;
    }
  }
}

SpaceSpec SpaceSpec::lp(double p, std::size_t n) {
  if (std::isinf(p)) return sup(n);
  return SpaceSpec(NormSpec::lp(p, n), {true, true});
}

SpaceSpec SpaceSpec::sup(std::size_t n) { return SpaceSpec(NormSpec::sup(n), {true, true}); }

SpaceSpec SpaceSpec::lorentz(double p, double r, std::size_t n) {
  return SpaceSpec(NormSpec::lorentz(p, r, n), {true, true});
}

SpaceSpec SpaceSpec::of(const NormSpec& norm) {
  return SpaceSpec(norm, {false, norm.is_unconditional()});
}

bool SpaceSpec::is_pinned(std::size_t i) const { return std::binary_search(pinned_.begin(), pinned_.end(), i); }

GammaExponent SpaceSpec::gamma() const {
  // On {0} × X the theta norm is 2^{1/γ-1}‖·‖_X, a norm.
  if (norm_.family() == Family::Theta && pinned_.size() == 1 && pinned_[0] == 0) return GammaExponent(1.0);
  return norm_.certified_gamma();
}

double fundamental_function(const SpaceSpec& space, std::size_t m) {
  if (!space.flags().claims_symmetric) throw DomainError("fundamental function needs a symmetric basis");
  if (m < 1 || m > space.dim()) throw DomainError("m out of range");
  Vec v(space.dim(), 0.0);
  std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), 1.0);
  return space.eval(v);
}

namespace {

void draw(Rng& rng, Vec& a) {
  switch (rng.index(3)) {
    case 0:
      for (auto& c : a) c = rng.normal();
      break;
    case 1:
      for (auto& c : a) c = rng.uniform(-1.0, 1.0) * std::exp(rng.uniform(-4.0, 4.0));
      break;
    default:
      std::fill(a.begin(), a.end(), 0.0);
      for (int j = 0; j < 2; ++j) a[rng.index(a.size())] = rng.normal();
      break;
  }
}

double basis_residual(const SpaceSpec& space, std::size_t trials, std::uint64_t seed, bool permute) {
  Rng rng(seed);
  const std::size_t n = space.dim();
  Vec a(n), b(n);
  std::vector<std::size_t> perm(n);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    draw(rng, a);
    std::iota(perm.begin(), perm.end(), 0);
    if (permute)
      for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    for (std::size_t i = 0; i < n; ++i) b[i] = rng.sign() * a[perm[i]];
    for (auto i : space.pinned()) a[i] = b[i] = 0.0;
    const double na = space.eval(a);
    worst = std::max(worst, std::fabs(na - space.eval(b)) / std::max(1.0, na));
  }
  return worst;
}

}  // namespace

double check_symmetry(const SpaceSpec& space, std::size_t trials, std::uint64_t seed) {
  return basis_residual(space, trials, seed, true);
}

double check_unconditional(const SpaceSpec& space, std::size_t trials, std::uint64_t seed) {
  return basis_residual(space, trials, seed, false);
}

QBox q_box(VecView u, VecView v) {
  if (u.size() != v.size()) throw DimensionError("q_box needs equal dims");
  QBox b{Vec(u.size()), Vec(u.size())};
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0) || !(v[i] >= 0.0)) throw DomainError("q_box needs nonnegative vectors");
    const double m = std::min(u[i], v[i]), big = std::max(u[i], v[i]);
    b.lo[i] = big - m;
    b.hi[i] = big + m;
  }
  return b;
}

double q_gamma_residual(const SpaceSpec& e, VecView u, VecView v, std::size_t grid_per_axis,
                        std::size_t random_points, std::uint64_t seed) {
  if (!e.flags().claims_unconditional) throw DomainError("condition (Q) is defined for 1-unconditional bases");
  if (u.size() != e.dim() || v.size() != e.dim()) throw DimensionError("q_gamma_residual dims");
  if (grid_per_axis < 2) throw DomainError("grid needs at least 2 points per axis");
  const QBox box = q_box(u, v);
  const double g = e.gamma().value();
  const std::size_t n = e.dim();
  double sup = 0.0;
  Vec x(n);
  auto visit = [&] { sup = std::max(sup, gpow(e.eval(x), g)); };
  if (n == 2) {
    const double den = static_cast<double>(grid_per_axis - 1);
    for (std::size_t i = 0; i < grid_per_axis; ++i) {
      x[0] = box.lo[0] + (box.hi[0] - box.lo[0]) * (static_cast<double>(i) / den);
      for (std::size_t j = 0; j < grid_per_axis; ++j) {
        x[1] = box.lo[1] + (box.hi[1] - box.lo[1]) * (static_cast<double>(j) / den);
        visit();
      }
    }
  } else {
    if (n > 20) throw BudgetError("too many box corners");
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1ULL ? box.hi[i] : box.lo[i];
      visit();
    }
    Rng rng(seed);
    for (std::size_t t = 0; t < random_points; ++t) {
      for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
      visit();
    }
  }
  return sup - gpow(e.eval(u), g) - gpow(e.eval(v), g);
}

double q_corner_max(const SpaceSpec& e, VecView u, VecView v) {
  if (e.dim() != 2) throw DimensionError("q_corner_max is two-dimensional");
  const QBox b = q_box(u, v);
  const double g = e.gamma().value();
  const Vec c1{b.hi[0], b.hi[1]}, c2{b.lo[0], b.hi[1]};
  return std::max(gpow(e.eval(c1), g), gpow(e.eval(c2), g));
}

}  // namespace qbent
