#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qbent/random.hpp"
#include "qbent/sampling.hpp"
#include "qbent/spaces.hpp"

using namespace qbent;

namespace {
const GammaExponent g12(0.5), g23(2.0 / 3.0);
}

TEST_CASE("space construction") {
  CHECK(SpaceSpec::lp(2, 3).dim() == 3);
  CHECK_THROWS_AS(SpaceSpec(NormSpec::omega(g12), {true, true}), DomainError);  // ω(e_2) = 2^{1/γ-1}
  CHECK_THROWS_AS(SpaceSpec(NormSpec::lp(1, 2), {}, {0, 1}), DimensionError);
  const SpaceSpec pinned(NormSpec::theta(g12, NormSpec::sup(3)), {false, true}, {0});
  CHECK(pinned.gamma().value() == 1.0);
  CHECK(SpaceSpec::of(NormSpec::theta(g12, NormSpec::sup(3))).gamma().value() == 0.5);
}

TEST_CASE("fundamental function") {
  for (std::size_t n : {1u, 3u, 7u})
    CHECK(fundamental_function(SpaceSpec::lp(0.5, n), n) == doctest::Approx(double(n * n)).epsilon(1e-13));
  for (const auto& s : {SpaceSpec::lp(0.5, 4), SpaceSpec::lp(2, 4), SpaceSpec::sup(4), SpaceSpec::lorentz(1, 2, 4)})
    CHECK(fundamental_function(s, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(fundamental_function(SpaceSpec::lp(1, 3), 4), DomainError);
  CHECK_THROWS_AS(fundamental_function(SpaceSpec::lp(1, 3), 0), DomainError);
  CHECK_THROWS_AS(fundamental_function(SpaceSpec::of(NormSpec::omega(g12)), 1), DomainError);
}

TEST_CASE("fundamental function is non-decreasing") {
  for (const auto& s : {SpaceSpec::lp(1.0 / 3, 12), SpaceSpec::lp(2, 12), SpaceSpec::lorentz(1, INFINITY, 12),
                        SpaceSpec::lorentz(0.5, 2, 12), SpaceSpec::lorentz(2, 1, 12)})
    for (std::size_t m = 1; m < 12; ++m) CHECK(fundamental_function(s, m) <= fundamental_function(s, m + 1));
}

TEST_CASE("lorentz fundamental function grows like n^{1/p}") {
  // Oracle: (Σ_{j<=n} j^{r/p - 1})^{1/r} lies between constant multiples of
  // n^{1/p}; fit the log-log slope over n = 2^4..2^9.
  for (auto [p, r] : {std::pair{1.0, 2.0}, {2.0, 1.0}, {0.5, 4.0}, {1.5, 1.5}}) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int e = 4; e <= 9; ++e) {
      const std::size_t n = 1u << e;
      const double f = fundamental_function(SpaceSpec::lorentz(p, r, n), n);
      sx += e;
      sy += std::log2(f);
      sxx += e * e;
      sxy += e * std::log2(f);
      ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(slope == doctest::Approx(1.0 / p).epsilon(0.05));
  }
}

TEST_CASE("symmetry and unconditionality") {
  for (double p : {1.0 / 3, 0.5, 1.0, 2.0}) {
    CHECK(check_symmetry(SpaceSpec::lp(p, 6), 2000, 1) == 0.0);
    CHECK(check_unconditional(SpaceSpec::lp(p, 6), 2000, 1) == 0.0);
  }
  CHECK(check_unconditional(SpaceSpec::lorentz(1, 2, 6), 2000, 1) == 0.0);
  CHECK(check_symmetry(SpaceSpec::lorentz(1, 2, 6), 2000, 1) == 0.0);
  const auto om = SpaceSpec::of(NormSpec::omega(g12));
  CHECK(check_symmetry(om, 2000, 1) > 0.1);
  CHECK(omega_norm(g12, 3, 1) != omega_norm(g12, 1, 3));
  CHECK(check_unconditional(om, 2000, 1) <= 1e-12);
  CHECK(check_symmetry(om, 0, 1) == 0.0);
  // Grid check of ω(±x1, ±x2).
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double a = -2 + 0.1 * i, b = -2 + 0.1 * j, w = omega_norm(g23, a, b);
      CHECK(std::fabs(omega_norm(g23, -a, b) - w) <= 1e-12);
      CHECK(std::fabs(omega_norm(g23, a, -b) - w) <= 1e-12);
    }
}

TEST_CASE("q box") {
  auto b = q_box(Vec{1, 1}, Vec{1, 1});
  CHECK(b.lo == Vec{0, 0});
  CHECK(b.hi == Vec{2, 2});
  b = q_box(Vec{2, 0}, Vec{1, 3});
  CHECK(b.lo == Vec{1, 3});
  CHECK(b.hi == Vec{3, 3});
  b = q_box(Vec{1.5, 2}, Vec{0, 0});
  CHECK(b.lo == b.hi);
  CHECK(b.lo == Vec{1.5, 2});
  CHECK_THROWS_AS(q_box(Vec{-1, 0}, Vec{0, 0}), DomainError);
  CHECK_THROWS_AS(q_box(Vec{1}, Vec{0, 0}), DimensionError);
}

TEST_CASE("condition Q for omega and l1") {
  Rng rng(21);
  for (auto g : {g12, g23}) {
    const auto om = SpaceSpec::of(NormSpec::omega(g));
    for (int t = 0; t < 40; ++t) {
      const Vec u{rng.uniform(0, 4), rng.uniform(0, 4)}, v{rng.uniform(0, 4), rng.uniform(0, 4)};
      CHECK(q_gamma_residual(om, u, v, 201) <= 1e-9);
      // The sup is at one of the two corners used in the reduction.
      const double sup = q_gamma_residual(om, u, v, 201) + std::pow(om.eval(u), g.value()) + std::pow(om.eval(v), g.value());
      CHECK(sup <= q_corner_max(om, u, v) + 1e-9);
      // Nested grids: 101 points are a subset of 201 points.
      CHECK(q_gamma_residual(om, u, v, 101) <= q_gamma_residual(om, u, v, 201));
    }
    CHECK(q_gamma_residual(om, Vec{1.2, 3.0}, Vec{0, 0}, 201) <= 0.0);
    CHECK(q_gamma_residual(om, Vec{0, 0}, Vec{0, 0}, 201) == 0.0);
  }
  const auto l1 = SpaceSpec::lp(1, 2);
  for (int t = 0; t < 40; ++t) {
    const Vec u{rng.uniform(0, 4), rng.uniform(0, 4)}, v{rng.uniform(0, 4), rng.uniform(0, 4)};
    CHECK(q_gamma_residual(l1, u, v, 201) <= 1e-9);
  }
  // Higher dimension: corners plus random points.
  const auto l1_4 = SpaceSpec::lp(1, 4);
  CHECK(q_gamma_residual(l1_4, Vec{1, 2, 0, 1}, Vec{0.5, 0, 3, 1}) <= 1e-9);
  CHECK_THROWS_AS(q_gamma_residual(SpaceSpec::of(NormSpec::phi(g12)), Vec{1, 1}, Vec{1, 1}), DomainError);
  CHECK_THROWS_AS(q_gamma_residual(l1, Vec{1, 1, 1}, Vec{1, 1, 1}), DimensionError);
}

TEST_CASE("box geometry helpers") {
  const auto l1 = SpaceSpec::lp(1, 3);
  CHECK(box_sup_norm(l1, Vec{0.1, 0.2, 0.3}) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(box_meets_ball(l1, Vec{0.4, 0.4, 0.4}, Vec{0.1, 0.1, 0.1}));
  CHECK_FALSE(box_meets_ball(l1, Vec{0.5, 0.5, 0.5}, Vec{0.1, 0.1, 0.1}));
  const auto om = SpaceSpec::of(NormSpec::omega(g12));
  // Non-monotone: the γ-sum bound over the box offsets.
  CHECK(box_sup_norm(om, Vec{0.1, 0.1}) == doctest::Approx(std::pow(std::sqrt(0.1) + std::sqrt(0.2), 2)).epsilon(1e-13));
}

TEST_CASE("lattice nets cover the ball") {
  Rng rng(23);
  for (const auto& x : {SpaceSpec::lp(1, 2), SpaceSpec::lp(0.5, 2), SpaceSpec::lp(2, 3), SpaceSpec::sup(2)}) {
    const double h = 0.1;
    const auto net = lattice_net(x, h, 100000);
    CHECK(net.points.size() == lattice_net_size(x, h, 1000000));
    // Every ball point is within half a cell of a lattice point that the net kept.
    for (int t = 0; t < 2000; ++t) {
      Vec v(x.dim());
      for (auto& c : v) c = rng.uniform(-1, 1);
      if (x.eval(v) > 1.0) continue;
      bool found = false;
      for (std::size_t i = 0; i < net.points.size() && !found; ++i) {
        bool inside = true;
        for (std::size_t d = 0; d < x.dim(); ++d) inside &= std::fabs(net.points.row(i)[d] - v[d]) <= h / 2 + 1e-12;
        found = inside;
      }
      CHECK(found);
    }
  }
  CHECK_THROWS_AS(lattice_net(SpaceSpec::lp(1, 3), 0.01, 1000), BudgetError);
  CHECK(spacing_for_delta(SpaceSpec::lp(1, 2), 0.1) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("source cloud stays in the unit ball") {
  for (const auto& x : {SpaceSpec::lp(1, 4), SpaceSpec::lp(0.5, 3), SpaceSpec::lorentz(1, 2, 5), SpaceSpec::sup(2)}) {
    const auto cloud = source_cloud(x, 3000, 5);
    CHECK(cloud.size() == 3000);
    for (std::size_t i = 0; i < cloud.size(); ++i) CHECK(x.eval(cloud.row(i)) <= 1.0);
    const auto again = source_cloud(x, 3000, 5);
    for (std::size_t i = 0; i < cloud.size(); ++i)
      for (std::size_t d = 0; d < x.dim(); ++d) CHECK(cloud.row(i)[d] == again.row(i)[d]);
  }
}
