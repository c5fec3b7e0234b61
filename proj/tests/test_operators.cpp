#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qbent/operators.hpp"
#include "qbent/random.hpp"

using namespace qbent;

namespace {

const GammaExponent g12(0.5), g23(2.0 / 3.0);

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = rng.normal();
  return a;
}

SpaceSpec random_lp(Rng& rng, std::size_t n) {
  static const double ps[] = {1.0 / 3, 0.5, 1.0, 1.5, 2.0, INFINITY};
  const double p = ps[rng.index(6)];
  return std::isinf(p) ? SpaceSpec::sup(n) : SpaceSpec::lp(p, n);
}

NormBudget quick() {
  NormBudget b;
  b.starts = 24;
  b.max_cells = 20000;
  return b;
}

}  // namespace

TEST_CASE("apply is linear") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const int rows = 1 + static_cast<int>(rng.index(5)), cols = 1 + static_cast<int>(rng.index(5));
    const auto op = LinearOperator::dense(random_matrix(rng, rows, cols), random_lp(rng, cols), random_lp(rng, rows));
    Vec x(cols), y(cols), z(cols);
    for (auto& c : x) c = rng.normal();
    for (auto& c : y) c = rng.normal();
    const double a = rng.normal(), b = rng.normal();
    for (int i = 0; i < cols; ++i) z[i] = a * x[i] + b * y[i];
    const Vec tx = op.apply(x), ty = op.apply(y), tz = op.apply(z);
    for (int i = 0; i < rows; ++i) CHECK(std::fabs(tz[i] - (a * tx[i] + b * ty[i])) <= 1e-12 * (1 + std::fabs(tz[i])));
  }
}

TEST_CASE("construction checks") {
  CHECK_THROWS_AS(LinearOperator::dense(Eigen::MatrixXd::Zero(2, 3), SpaceSpec::lp(1, 2), SpaceSpec::lp(1, 2)),
                  DimensionError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = NAN;
  CHECK_THROWS_AS(LinearOperator::dense(bad, SpaceSpec::lp(1, 2), SpaceSpec::lp(1, 2)), DomainError);
  const SpaceSpec pinned(NormSpec::theta(g12, NormSpec::sup(2)), {false, true}, {0});
  CHECK_THROWS_AS(LinearOperator::dense(Eigen::MatrixXd::Identity(3, 3), pinned, SpaceSpec::lp(1, 3)), DomainError);
  CHECK_THROWS_AS(LinearOperator::dense(Eigen::MatrixXd::Identity(3, 3), SpaceSpec::lp(1, 3), pinned), DomainError);
  CHECK_THROWS_AS(make_structured_operator(OperatorForm::SharpT, g12, 0.5, 3), DomainError);
  CHECK_THROWS_AS(make_structured_operator(OperatorForm::ProjectionP, g12, 1, 4, 3), DomainError);
  CHECK_THROWS_AS(make_structured_operator(OperatorForm::Dense, g12, 1, 4), DomainError);
  CHECK_THROWS_AS(make_embedding(SpaceSpec::lp(1, 2), SpaceSpec::lp(1, 3)), DimensionError);
}

TEST_CASE("structured operator matrices") {
  const auto tt = make_structured_operator(OperatorForm::TildeT, g12, 1, 1);
  CHECK(tt.apply(Vec{0.7}) == Vec{0.0, 0.7});
  const auto st = make_structured_operator(OperatorForm::SharpT, g23, 2, 3);
  CHECK(st.apply(Vec{1, 2, 3}) == Vec{0, 1, 2, 3});
  CHECK(st.target().norm().family() == Family::Theta);
  const auto t0 = make_structured_operator(OperatorForm::T0, g12, 1, 4);
  CHECK(t0.target().is_pinned(0));
  CHECK(t0.target().gamma().value() == 1.0);
  const auto ti = make_structured_operator(OperatorForm::Tinf, g12, 1, 4);
  CHECK(ti.target().pinned().empty());
  CHECK(ti.matrix() == t0.matrix());
  const auto p = make_structured_operator(OperatorForm::ProjectionP, g12, 1, 2);
  CHECK(p.source_dim() == 4);
  CHECK(p.apply(Vec{1, 2, 3, 4}) == Vec{1, 2});
  const auto j = make_structured_operator(OperatorForm::InjectionJ, g12, 2, 2, 5);
  CHECK(j.apply(Vec{1, 2}) == Vec{1, 2, 0, 0, 0});
  const auto pr = make_theta_projection(g12, 1, 3);
  CHECK(pr.apply(Vec{9, 1, 2, 3}) == Vec{1, 2, 3});
}

TEST_CASE("closed-form norms agree with brute force") {
  // Oracle: ‖T‖ = sup over a sample of ‖Tx‖/‖x‖ from random directions and
  // ±e_i; brute-force values can only be below the true norm.
  Rng rng(5);
  auto brute = [&](const LinearOperator& t) {
    double best = 0.0;
    Vec x(t.source_dim());
    for (int s = 0; s < 20000; ++s) {
      if (s < static_cast<int>(t.source_dim())) {
        std::fill(x.begin(), x.end(), 0.0);
        x[s] = 1.0;
      } else {
        for (auto& c : x) c = rng.normal() * (rng.uniform() < 0.3 ? 0.0 : 1.0);
      }
      const double nx = t.source().eval(x);
      if (nx > 0.0) best = std::max(best, t.target().eval(t.apply(x)) / nx);
    }
    return best;
  };
  for (auto g : {g12, g23}) {
    for (auto form : {OperatorForm::TildeT, OperatorForm::SharpT, OperatorForm::T0, OperatorForm::Tinf}) {
      const auto t = make_structured_operator(form, g, 1, form == OperatorForm::TildeT ? 1 : 3);
      const double cf = *t.closed_form_norm();
      CHECK(cf == doctest::Approx(g.quasi_constant()).epsilon(1e-15));
      CHECK(brute(t) <= cf * (1 + 1e-12));
      CHECK(brute(t) >= cf * (1 - 1e-12));  // attained at a basis vector
    }
  }
  const auto e12 = make_embedding(SpaceSpec::lp(2, 4), SpaceSpec::lp(1, 4));
  CHECK(*e12.closed_form_norm() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(brute(e12) <= 2.0 + 1e-12);
  CHECK(*make_embedding(SpaceSpec::lp(1, 4), SpaceSpec::lp(2, 4)).closed_form_norm() == 1.0);
  CHECK(*make_embedding(SpaceSpec::sup(4), SpaceSpec::lp(0.5, 4)).closed_form_norm() == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(*make_structured_operator(OperatorForm::SharpT, g12, 1, 3).scaled(-3).closed_form_norm() ==
        doctest::Approx(6.0).epsilon(1e-15));
  CHECK_FALSE(LinearOperator::dense(Eigen::MatrixXd::Identity(2, 2), SpaceSpec::lp(1, 2), SpaceSpec::lp(1, 2))
                  .closed_form_norm()
                  .has_value());
}

TEST_CASE("operator norm bounds bracket exact oracles") {
  // Oracle: from ℓ_p with p <= 1 into a γ-normed space with γ >= p, the norm
  // is the largest column norm (the extreme points are ±e_j).
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const int rows = 1 + static_cast<int>(rng.index(4)), cols = 1 + static_cast<int>(rng.index(4));
    const double ps[] = {1.0, 2.0, 0.5};
    const SpaceSpec y = SpaceSpec::lp(ps[rng.index(3)], rows);
    const auto op = LinearOperator::dense(random_matrix(rng, rows, cols), SpaceSpec::lp(y.gamma().value() == 1 ? 1.0 : 0.5, cols), y);
    double exact = 0.0;
    for (int j = 0; j < cols; ++j) exact = std::max(exact, y.eval(op.column(j)));
    const auto est = operator_norm_bounds(op, quick(), 1);
    CHECK(est.lower <= exact * (1 + 1e-12));
    CHECK(est.upper >= exact * (1 - 1e-12));
    CHECK(est.lower >= exact * (1 - 1e-9));
  }
  // Oracle: ℓ_2 -> ℓ_2 norm is the largest singular value.
  for (int t = 0; t < 10; ++t) {
    const auto a = random_matrix(rng, 3, 3);
    const auto op = LinearOperator::dense(a, SpaceSpec::lp(2, 3), SpaceSpec::lp(2, 3));
    const double sv = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
    NormBudget b = quick();
    b.max_cells = 50000;
    const auto est = operator_norm_bounds(op, b, 2);
    CHECK(est.lower <= sv * (1 + 1e-12));
    CHECK(est.upper >= sv * (1 - 1e-12));
    CHECK(est.lower >= sv * (1 - 1e-6));
    CHECK(est.upper <= sv * 1.05);
  }
  const auto z = LinearOperator::dense(Eigen::MatrixXd::Zero(2, 2), SpaceSpec::lp(1, 2), SpaceSpec::lp(1, 2));
  const auto ez = operator_norm_bounds(z, quick(), 1);
  CHECK(ez.lower == 0.0);
  CHECK(ez.upper == 0.0);
}

TEST_CASE("net bound is a valid upper bound") {
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_matrix(rng, 2, 2);
    const auto op = LinearOperator::dense(a, SpaceSpec::lp(1.5, 2), SpaceSpec::of(NormSpec::omega(g12)));
    NormBudget b = quick();
    b.net_delta = 0.01;
    b.max_cells = 10;
    const auto est = operator_norm_bounds(op, b, 3);
    // Oracle: fine angular scan of the unit sphere, a lower estimate of ‖T‖.
    double scan = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const double th = 2 * M_PI * i / 20000.0;
      const Vec x{std::cos(th), std::sin(th)};
      scan = std::max(scan, op.target().eval(op.apply(x)) / op.source().eval(x));
    }
    CHECK(est.upper >= scan * (1 - 1e-12));
    CHECK(est.lower <= est.upper);
  }
}

TEST_CASE("image box radius dominates sampled box images") {
  Rng rng(11);
  const SpaceSpec targets[] = {SpaceSpec::lp(0.5, 3), SpaceSpec::lp(2, 3), SpaceSpec::of(NormSpec::theta(g12, NormSpec::sup(2)))};
  for (const auto& y : targets)
    for (int t = 0; t < 20; ++t) {
      const auto op = LinearOperator::dense(random_matrix(rng, 3, 2), SpaceSpec::lp(1, 2), y);
      const Vec h{rng.uniform(0, 1), rng.uniform(0, 1)};
      const double rad = image_box_radius(op, h);
      for (int s = 0; s < 500; ++s) {
        const Vec x{rng.uniform(-h[0], h[0]), rng.uniform(-h[1], h[1])};
        CHECK(y.eval(op.apply(x)) <= rad * (1 + 1e-12));
      }
    }
}

TEST_CASE("left inverses") {
  for (double p : {1.0, 2.0}) {
    const auto st = make_structured_operator(OperatorForm::SharpT, g12, p, 3);
    const auto li = st.left_inverse();
    REQUIRE(li);
    CHECK(li->z == SpaceSpec::lp(p, 3));
    const auto pr = make_theta_projection(g12, p, 3);
    CHECK(compose(pr, st).matrix() == Eigen::MatrixXd::Identity(3, 3));
    NormBudget b = quick();
    b.max_cells = 200;
    CHECK(operator_norm_bounds(pr, b, 1).lower <= li->norm_upper * (1 + 1e-12));
  }
  CHECK(make_structured_operator(OperatorForm::TildeT, g12, 1, 1).scaled(2).left_inverse()->norm_upper == 0.5);
  CHECK_FALSE(make_structured_operator(OperatorForm::T0, g12, 1, 3).left_inverse());
}

TEST_CASE("compose and add") {
  const auto a = make_embedding(SpaceSpec::lp(1, 2), SpaceSpec::lp(2, 2));
  const auto b = make_embedding(SpaceSpec::lp(2, 2), SpaceSpec::lp(0.5, 2));
  const auto ba = compose(b, a);
  CHECK(ba.source() == a.source());
  CHECK(ba.target() == b.target());
  CHECK_THROWS_AS(compose(a, a), DimensionError);
  CHECK(add(a, a).matrix() == 2 * Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(add(a, b), DimensionError);
}

TEST_CASE("matrix text format") {
  std::istringstream ok("2 3\n1 2 3\n\n4 5 6e-1\n");
  const auto m = parse_matrix(ok);
  CHECK(m.rows() == 2);
  CHECK(m(1, 2) == 0.6);
  for (const char* bad : {"", "2\n1 2\n", "1 2\n1\n", "1 2\n1 2 3\n", "1 1\nx\n", "1 1\n1\n2\n", "0 1\n"}) {
    std::istringstream in(bad);
    CHECK_THROWS_AS(parse_matrix(in), ParseError);
  }
}
