#include "qbent/sharpness.hpp"

#include <algorithm>
#include <limits>

#include "qbent/random.hpp"

namespace qbent {

namespace {

double lgamma_norm(VecView v, double g) {
  double s = 0.0;
  for (double c : v) s += gpow(std::fabs(c), g);
  return gpow(s, 1.0 / g);
}

SharpnessReport bracket(std::string claim, int k, double lo, double hi, double tlo, double thi, std::string method) {
  SharpnessReport r{std::move(claim), k, 0.0, lo, hi, tlo, thi, false, 0.0, std::move(method)};
  return r;
}

}  // namespace

double pair_residual(VecView x, VecView y, const AlphaBetaGamma& p) {
  if (x.size() != y.size()) throw DimensionError("pair residual: x and y dims differ");
  const double g = p.gamma.value(), c = p.gamma.quasi_constant();
  if (std::fabs(lgamma_norm(x, g) - 1.0) > 1e-9) throw DomainError("pair residual: x must be a unit vector of l_gamma");
  if (lgamma_norm(y, g) > p.beta * (1.0 + 1e-12)) throw DomainError("pair residual: y must satisfy |y| <= beta");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += gpow(std::fabs(c * x[i] - y[i]), g) + gpow(std::fabs(c * x[i] + y[i]), g);
  return s - constant_A(p);
}

double pair_residual_sweep(const AlphaBetaGamma& p, std::size_t pairs, std::uint64_t seed) {
  const double g = p.gamma.value();
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  Vec x, y;
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t d = 1 + rng.index(8);
    x.assign(d, 0.0);
    y.assign(d, 0.0);
    for (auto& c : x) c = rng.normal();
    if (t % 5 == 0) x[rng.index(d)] *= 20.0;
    const double nx = lgamma_norm(x, g);
    for (auto& c : x) c /= nx;
    if (t % 3 == 0) {
      for (std::size_t i = 0; i < d; ++i)
        if (rng.uniform() < 0.5) y[i] = p.alpha * x[i];
    } else {
      for (auto& c : y) c = rng.normal();
    }
    const double ny = lgamma_norm(y, g);
    if (ny > 0.0) {
      const double target = t % 3 == 0 ? std::min(ny, p.beta) : rng.uniform(0.0, p.beta);
      for (auto& c : y) c *= target / ny;
      // Rounding may push the rescaled norm a hair above β.
      while (lgamma_norm(y, g) > p.beta)
        for (auto& c : y) c = std::nextafter(c, 0.0);
    }
    worst = std::min(worst, pair_residual(x, y, p));
  }
  return worst;
}

GMonotone g_monotone_residual(double a, GammaExponent g, std::size_t grid) {
  if (!(a > 0.0)) throw DomainError("g_a needs a > 0");
  if (grid < 2) throw DomainError("g_a grid needs at least two points");
  const double gv = g.value();
  auto ga = [&](double t) { return gpow(std::fabs(a - t), gv) + gpow(std::fabs(a + t), gv); };
  GMonotone out;
  double running_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = a * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double v = ga(t);
    if (i > 0) out.increase = std::max(out.increase, v - running_min);
    running_min = std::min(running_min, v);
    out.odd_part = std::max(out.odd_part, std::fabs(v - ga(-t)));
  }
  return out;
}

SharpnessReport verify_packing_constant(GammaExponent g, int k, std::size_t m) {
  const std::size_t need = (std::size_t{1} << (k - 1)) + 1;
  if (m < need) throw DomainError("packing-constant needs m >= 2^{k-1}+1");
  const auto x = SpaceSpec::lp(g.value(), m);
  const auto id = make_embedding(x, x);
  PointCloud samples(m);
  for (double s : {1.0, -1.0})
    for (std::size_t i = 0; i < m; ++i) {
      Vec e(m, 0.0);
      e[i] = s;
      samples.push(e);
    }
  const Packing pk = greedy_packing(id, samples, k);
  const double c = g.quasi_constant();
  const double upper = c * *id.closed_form_norm();
  auto r = bracket("packing-constant", k, pk.f_lower, upper, c, c, "packing:unit-vectors;upper:quasi-constant*norm");
  r.f_lower = pk.f_lower;
  r.margin = 1e-12 - std::max(std::fabs(pk.f_lower - c), std::fabs(upper - c));
  r.pass = r.margin >= 0.0;
  return r;
}

SharpnessReport verify_segment_cover(GammaExponent g, double net_delta) {
  const auto t = make_structured_operator(OperatorForm::TildeT, g, 1.0, 1);
  const double c = g.quasi_constant();
  const auto norm = operator_norm_bounds(t, NormBudget{}, 1);
  const auto net = lattice_net(t.source(), spacing_for_delta(t.source(), net_delta), 20000000);
  PointCloud seed(2);
  seed.push(Vec{1.0, 0.0});
  const Covering cov = greedy_covering(t, net, 1, norm.upper, &seed);
  const double lower = symmetry_e1_lower(norm.lower, g);
  // Exact cover inequality on the segment.
  double grid_worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double s = -1.0 + 2.0 * i / 9999.0;
    grid_worst = std::max(grid_worst, omega_norm(g, -1.0, s));
  }
  auto r = bracket("segment-cover", 1, lower, cov.radius, 1.0, 1.0 + kSharpTolK1, "lower:symmetry;upper:" + cov.method + "@(1,0)");
  const double norm_err = std::max(std::fabs(norm.lower - c), std::fabs(norm.upper - c));
  r.margin = std::min({lower - (1.0 - 1e-12), 1.0 + kSharpTolK1 - cov.radius, 1e-9 - norm_err, 1.0 + 1e-12 - grid_worst});
  r.pass = r.margin >= 0.0;
  return r;
}

std::vector<SharpnessReport> verify_sharp_t(GammaExponent g, double p, std::size_t m, int k_max,
                                          const EstimatorBudget& budget, std::uint64_t seed) {
  if (m < (std::size_t{1} << (k_max - 1)) + 1) throw DomainError("sharp-t needs m >= 2^{k_max-1}+1");
  const auto t = make_structured_operator(OperatorForm::SharpT, g, p, m);
  const auto tab = entropy_bounds_table(t, k_max, budget, seed);
  // 2^{1-1/γ}‖T‖ = 1.
  const double scaled_norm = std::exp2(1.0 - 1.0 / g.value()) * tab.norm.upper;
  std::vector<SharpnessReport> out;
  for (const auto& row : tab.rows) {
    const double tol = row.k == 1 ? kSharpTolK1 : kSharpTolK;
    auto r = bracket("sharp-t", row.k, row.e_lower, row.e_upper, 1.0 - tol, 1.0 + tol,
                     "lower:" + row.lower_method + ";upper:" + row.upper_method);
    r.f_lower = row.f_lower;
    r.margin = std::min({row.e_lower - (1.0 - tol), 1.0 + tol - row.e_upper, tol - std::fabs(scaled_norm - 1.0)});
    r.pass = r.margin >= 0.0;
    out.push_back(r);
  }
  return out;
}

std::vector<SharpnessReport> verify_injection_sections(GammaExponent g, std::size_t m, int k, const EstimatorBudget& budget,
                                               std::uint64_t seed) {
  if (k < 2) throw DomainError("injection sections need k >= 2");
  if (m < (std::size_t{1} << (k - 1)) + 1) throw DomainError("injection sections need m >= 2^{k-1}+1");
  const double c = g.quasi_constant();
  const auto tinf = make_structured_operator(OperatorForm::Tinf, g, 1.0, m);
  const auto t0 = make_structured_operator(OperatorForm::T0, g, 1.0, m);
  const auto bi = entropy_bounds_table(tinf, k, budget, mix_seed(seed, 1)).rows.back();
  const auto b0 = entropy_bounds_table(t0, k, budget, mix_seed(seed, 2)).rows.back();
  std::vector<SharpnessReport> out;

  const double hi = 0.5 + std::exp2(1.0 - k);
  auto ri = bracket("injection-tinf", k, bi.e_lower, bi.e_upper, 0.5, hi,
                    "lower:" + bi.lower_method + ";upper:" + bi.upper_method);
  ri.f_lower = bi.f_lower;
  ri.margin = std::min(hi + 1e-9 - bi.e_lower, bi.e_upper - (0.5 - 1e-9));
  ri.pass = ri.margin >= 0.0;
  out.push_back(ri);

  auto r0 = bracket("injection-t0", k, b0.e_lower, b0.e_upper, 0.8 * c, c,
                    "lower:" + b0.lower_method + ";upper:" + b0.upper_method);
  r0.f_lower = b0.f_lower;
  r0.margin = std::min(c + 1e-9 - b0.e_upper, b0.e_lower - 0.8 * c);
  r0.pass = r0.margin >= 0.0;
  out.push_back(r0);

  // e_k(T0)/e_k(ιT0) with ιT0 = T∞; the bracket comes from both pairs of bounds.
  const double target = c / hi;
  const double rlo = bi.e_upper > 0.0 ? b0.e_lower / bi.e_upper : 0.0;
  const double rhi = bi.e_lower > 0.0 ? b0.e_upper / bi.e_lower : std::numeric_limits<double>::infinity();
  auto rr = bracket("injection-ratio", k, rlo, rhi, target * (1.0 - kSharpTolK), std::exp2(1.0 / g.value()),
                    "t0-bounds/tinf-bounds");
  rr.margin = rhi - target * (1.0 - kSharpTolK);
  rr.pass = rr.margin >= 0.0;
  out.push_back(rr);
  return out;
}

std::vector<SharpnessReport> verify_metric_injection(const LinearOperator& t, const LinearOperator& iota, int k,
                                                   const EstimatorBudget& budget, std::uint64_t seed) {
  // Check ‖ιy‖ = ‖y‖ on target samples.
  const PointCloud probe = source_cloud(iota.source(), 4000, mix_seed(seed, 3));
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double a = iota.source().eval(probe.row(i)), b = iota.target().eval(iota.apply(probe.row(i)));
    if (std::fabs(a - b) > 1e-12 * std::max(1.0, a)) throw DomainError("metric injection: iota is not norm-preserving");
  }
  const LinearOperator it = compose(iota, t);
  const double g = iota.target().gamma().value();
  const auto bt = entropy_bounds_table(t, k, budget, mix_seed(seed, 1)).rows.back();
  const auto bit = entropy_bounds_table(it, k, budget, mix_seed(seed, 2)).rows.back();
  std::vector<SharpnessReport> out;

  auto up = bracket("metric-injection-upper", k, bit.e_lower, bt.e_upper, 0.0, bt.e_upper, "e_lower(iT)<=e_upper(T)");
  up.margin = bt.e_upper - bit.e_lower;
  up.pass = up.margin >= -1e-12;
  out.push_back(up);

  const double cap = std::exp2(1.0 / g) * bit.e_upper;
  auto lo = bracket("metric-injection-lower", k, bt.e_lower, cap, 0.0, cap, "e_lower(T)<=2^{1/g}e_upper(iT)");
  lo.margin = cap - bt.e_lower;
  lo.pass = lo.margin >= -1e-12;
  out.push_back(lo);

  const PointCloud cloud = source_cloud(t.source(), std::min<std::size_t>(budget.samples, 20000), mix_seed(seed, 4));
  const Packing p1 = greedy_packing(t, cloud, k), p2 = greedy_packing(it, cloud, k);
  auto pk = bracket("metric-injection-packing", k, p1.f_lower, p2.f_lower, p1.f_lower, p1.f_lower, "same-cloud packings");
  pk.f_lower = p1.f_lower;
  pk.margin = 1e-12 * std::max(1.0, p1.f_lower) - std::fabs(p1.f_lower - p2.f_lower);
  pk.pass = pk.margin >= 0.0;
  out.push_back(pk);
  return out;
}

}  // namespace qbent
