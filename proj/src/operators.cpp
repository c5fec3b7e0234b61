#include "qbent/operators.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <queue>
#include <sstream>

#include "qbent/norm_spec_io.hpp"
#include "qbent/parallel.hpp"
#include "qbent/random.hpp"

namespace qbent {

std::string form_name(OperatorForm f) {
  switch (f) {
    case OperatorForm::Dense: return "dense";
    case OperatorForm::Embedding: return "embedding";
    case OperatorForm::TildeT: return "tilde-t";
    case OperatorForm::SharpT: return "sharp-t";
    case OperatorForm::T0: return "t0";
    case OperatorForm::Tinf: return "tinf";
    case OperatorForm::ProjectionP: return "projection";
    case OperatorForm::InjectionJ: return "injection";
  }
  return "?";
}

LinearOperator::LinearOperator(OperatorForm form, Eigen::MatrixXd matrix, SpaceSpec source, SpaceSpec target,
                               StructuredParams params)
    : form_(form), m_(std::move(matrix)), source_(std::move(source)), target_(std::move(target)), params_(params) {
  if (static_cast<std::size_t>(m_.rows()) != target_.dim() || static_cast<std::size_t>(m_.cols()) != source_.dim())
    throw DimensionError("matrix shape does not match source/target dims");
  if (!source_.pinned().empty()) throw DomainError("source spaces cannot have pinned coordinates");
  if (!m_.allFinite()) throw DomainError("matrix has non-finite entries");
  for (auto i : target_.pinned())
    if (m_.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff() != 0.0)
      throw DomainError("operator image leaves the pinned target subspace");
}

LinearOperator LinearOperator::dense(Eigen::MatrixXd matrix, SpaceSpec source, SpaceSpec target) {
  return LinearOperator(OperatorForm::Dense, std::move(matrix), std::move(source), std::move(target));
}

Vec LinearOperator::apply(VecView x) const {
  Vec out(target_dim());
  apply_into(x, out);
  return out;
}

void LinearOperator::apply_into(VecView x, std::span<double> out) const {
  if (x.size() != source_dim()) throw DimensionError("apply: vector dim does not match source");
  const auto rows = m_.rows(), cols = m_.cols();
  for (Eigen::Index r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) acc += m_(r, c) * x[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
}

Vec LinearOperator::column(std::size_t j) const {
  Vec out(target_dim());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
  return out;
}

bool LinearOperator::is_zero() const { return m_.size() == 0 || m_.cwiseAbs().maxCoeff() == 0.0; }

LinearOperator LinearOperator::scaled(double s) const {
  if (!std::isfinite(s)) throw DomainError("scale must be finite");
  LinearOperator out = *this;
  out.m_ *= s;
  out.scale_ *= s;
  return out;
}

namespace {

std::optional<double> lp_exponent(const NormSpec& s) {
  if (s.family() == Family::LpGamma) return s.p();
  if (s.family() == Family::Sup) return std::numeric_limits<double>::infinity();
  return std::nullopt;
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace

std::optional<double> LinearOperator::closed_form_norm() const {
  const double s = std::fabs(scale_);
  switch (form_) {
    case OperatorForm::TildeT:
    case OperatorForm::SharpT:
    case OperatorForm::T0:
    case OperatorForm::Tinf:
      return s * params_.gamma.quasi_constant();
    case OperatorForm::ProjectionP:
    case OperatorForm::InjectionJ:
      return s;
    case OperatorForm::Embedding: {
      if (source_.norm() == target_.norm()) return s;
      auto p = lp_exponent(source_.norm()), q = lp_exponent(target_.norm());
      if (p && q) return s * std::pow(static_cast<double>(source_dim()), std::max(0.0, inv(*q) - inv(*p)));
      return std::nullopt;
    }
    case OperatorForm::Dense:
      if (is_zero()) return 0.0;
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<LeftInverse> LinearOperator::left_inverse() const {
  if (scale_ == 0.0) return std::nullopt;
  const double s = 1.0 / std::fabs(scale_);
  switch (form_) {
    case OperatorForm::Embedding:
      if (source_.norm() == target_.norm()) return LeftInverse{s, source_};
      return std::nullopt;
    case OperatorForm::SharpT:
    case OperatorForm::InjectionJ:
      return LeftInverse{s, SpaceSpec::lp(params_.p, params_.section_dim)};
    case OperatorForm::TildeT:
      // The second coordinate is dominated by ω, so ‖P‖ <= 1.
      return LeftInverse{s, SpaceSpec::lp(1.0, 1)};
    default:
      return std::nullopt;
  }
}

LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner) {
  if (!(inner.target().norm() == outer.source().norm())) throw DimensionError("compose: spaces do not chain");
  return LinearOperator::dense(outer.matrix() * inner.matrix(), inner.source(), outer.target());
}

LinearOperator add(const LinearOperator& a, const LinearOperator& b) {
  if (!(a.source().norm() == b.source().norm()) || !(a.target() == b.target()))
    throw DimensionError("add: operators act between different spaces");
  return LinearOperator::dense(a.matrix() + b.matrix(), a.source(), a.target());
}

LinearOperator make_embedding(const SpaceSpec& x, const SpaceSpec& y) {
  if (x.dim() != y.dim()) throw DimensionError("embedding needs equal dims");
  const auto n = static_cast<Eigen::Index>(x.dim());
  return LinearOperator(OperatorForm::Embedding, Eigen::MatrixXd::Identity(n, n), x, y);
}

LinearOperator make_structured_operator(OperatorForm tag, GammaExponent g, double p, std::size_t m, std::size_t ambient) {
  if (m < 1) throw DomainError("section_dim must be >= 1");
  const auto mi = static_cast<Eigen::Index>(m);
  StructuredParams params{g, p, m, ambient ? ambient : 2 * m};
  auto shifted = [&] {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(mi + 1, mi);
    a.bottomRows(mi).setIdentity();
    return a;
  };
  switch (tag) {
    case OperatorForm::TildeT: {
      params.section_dim = 1;
      params.p = 1.0;
      return LinearOperator(tag, shifted().topRows(2).leftCols(1), SpaceSpec::lp(1.0, 1),
                            SpaceSpec::of(NormSpec::omega(g)), params);
    }
    case OperatorForm::SharpT: {
      if (!(p >= 1.0)) throw DomainError("sharp-t needs p >= 1");
      auto x = SpaceSpec::lp(p, m);
      return LinearOperator(tag, shifted(), x, SpaceSpec::of(NormSpec::theta(g, x.norm())), params);
    }
    case OperatorForm::T0:
    case OperatorForm::Tinf: {
      params.p = 1.0;
      auto y = NormSpec::theta(g, NormSpec::sup(m));
      std::vector<std::size_t> pin;
      if (tag == OperatorForm::T0) pin.push_back(0);
      return LinearOperator(tag, shifted(), SpaceSpec::lp(1.0, m),
                            SpaceSpec(y, {false, true}, std::move(pin)), params);
    }
    case OperatorForm::ProjectionP: {
      if (params.ambient_dim < m) throw DomainError("ambient dim must be >= section dim");
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(mi, static_cast<Eigen::Index>(params.ambient_dim));
      a.leftCols(mi).setIdentity();
      return LinearOperator(tag, a, SpaceSpec::lp(p, params.ambient_dim), SpaceSpec::lp(p, m), params);
    }
    case OperatorForm::InjectionJ: {
      if (params.ambient_dim < m) throw DomainError("ambient dim must be >= section dim");
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(params.ambient_dim), mi);
      a.topRows(mi).setIdentity();
      return LinearOperator(tag, a, SpaceSpec::lp(p, m), SpaceSpec::lp(p, params.ambient_dim), params);
    }
    default:
      throw DomainError("not a structured operator tag: " + form_name(tag));
  }
}

LinearOperator make_theta_projection(GammaExponent g, double p, std::size_t m) {
  auto x = SpaceSpec::lp(p, m);
  const auto mi = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(mi, mi + 1);
  a.rightCols(mi).setIdentity();
  return LinearOperator(OperatorForm::ProjectionP, a, SpaceSpec::of(NormSpec::theta(g, x.norm())), x,
                        StructuredParams{g, p, m, m + 1});
}

Eigen::MatrixXd parse_matrix(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("matrix: missing 'rows cols' header");
  std::istringstream head(line);
  long rows = 0, cols = 0;
  std::string extra;
  if (!(head >> rows >> cols) || (head >> extra) || rows < 1 || cols < 1)
    throw ParseError("matrix: header must be two positive integers");
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!next_line()) throw ParseError("matrix: expected " + std::to_string(rows) + " rows");
    std::istringstream row(line);
    std::string tok;
    long c = 0;
    while (row >> tok) {
      if (c >= cols) throw ParseError("matrix: row " + std::to_string(r + 1) + " has too many entries");
      m(r, c++) = parse_real(tok);
    }
    if (c != cols) throw ParseError("matrix: row " + std::to_string(r + 1) + " has too few entries");
  }
  if (next_line()) throw ParseError("matrix: trailing data after the last row");
  return m;
}

double image_box_radius(const LinearOperator& t, VecView h) {
  const auto& y = t.target();
  const auto& a = t.matrix();
  const std::size_t rows = t.target_dim(), cols = t.source_dim();
  if (h.size() != cols) throw DimensionError("image_box_radius dims");
  Vec spread(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      spread[r] += std::fabs(a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) * h[c];
  double best = std::numeric_limits<double>::infinity();
  if (y.norm().is_monotone()) best = y.eval(spread);
  if (y.norm().family() == Family::Theta && spread[0] == 0.0 && y.norm().inner().is_monotone()) {
    const double c = y.norm().certified_gamma().quasi_constant();
    best = std::min(best, c * eval_norm(y.norm().inner(), VecView(spread).subspan(1)));
  }
  const double g = y.gamma().value();
  double acc = 0.0;
  Vec col(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    if (h[c] == 0.0) continue;
    for (std::size_t r = 0; r < rows; ++r) col[r] = a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * h[c];
    acc += gpow(y.eval(col), g);
  }
  return std::min(best, gpow(acc, 1.0 / g));
}

namespace {

double image_norm(const LinearOperator& t, VecView x, Vec& buf) {
  t.apply_into(x, buf);
  return t.target().eval(buf);
}

double ascent_lower(const LinearOperator& t, const NormBudget& b, std::uint64_t seed) {
  const std::size_t n = t.source_dim();
  const std::size_t starts = static_cast<std::size_t>(std::max(b.starts, 1));
  std::vector<double> best(starts, 0.0);
  const auto& x_space = t.source();
  parallel_for(starts, [&](std::size_t s) {
    Rng rng(seed, s);
    Vec x(n, 0.0), y(n), buf(t.target_dim());
    if (s < 2 * n) {
      x[s / 2] = s % 2 ? -1.0 : 1.0;
    } else if (s == 2 * n) {
      std::fill(x.begin(), x.end(), 1.0);
    } else {
      for (auto& c : x) c = rng.normal();
    }
    double nx = x_space.eval(x);
    if (nx == 0.0) {
      x[0] = 1.0;
      nx = x_space.eval(x);
    }
    for (auto& c : x) c /= nx;
    double val = image_norm(t, x, buf) / x_space.eval(x);
    double step = 0.5;
    for (int it = 0; it < b.iterations && step > 1e-13; ++it) {
      bool improved = false;
      for (std::size_t i = 0; i < n; ++i)
        for (double sg : {1.0, -1.0}) {
          y = x;
          y[i] += sg * step;
          const double ny = x_space.eval(y);
          if (ny == 0.0) continue;
          for (auto& c : y) c /= ny;
          const double v = image_norm(t, y, buf) / x_space.eval(y);
          if (v > val) {
            val = v;
            x = y;
            improved = true;
          }
        }
      if (!improved) step *= b.step_decay;
    }
    best[s] = val;
  });
  return *std::max_element(best.begin(), best.end());
}

struct Cell {
  double bound;
  Vec c;
  Vec h;
  bool operator<(const Cell& o) const { return bound < o.bound; }
};

// Branch and bound over boxes covering B_X ∩ {x_0 >= 0}; the other half
// follows from ‖T(-x)‖ = ‖Tx‖.
std::pair<double, double> box_bound(const LinearOperator& t, const NormBudget& b, double lower, bool& converged) {
  const std::size_t n = t.source_dim();
  const double g = t.target().gamma().value();
  Vec col_norm(n);
  for (std::size_t j = 0; j < n; ++j) col_norm[j] = t.target().eval(t.column(j));
  Vec buf(t.target_dim());
  auto make = [&](Vec c, Vec h) {
    const double center = image_norm(t, c, buf);
    const double nc = t.source().eval(c);
    if (nc > 0.0) lower = std::max(lower, center / nc);
    const double bound = gpow(gpow(center, g) + gpow(image_box_radius(t, h), g), 1.0 / g);
    return Cell{bound, std::move(c), std::move(h)};
  };
  std::priority_queue<Cell> queue;
  Vec c0(n, 0.0), h0(n, 1.0);
  c0[0] = 0.5;
  h0[0] = 0.5;
  queue.push(make(c0, h0));
  std::size_t cells = 1;
  converged = false;
  while (!queue.empty()) {
    const Cell& top = queue.top();
    if (top.bound <= lower * (1.0 + b.rel_tol)) {
      converged = true;
      break;
    }
    if (cells >= b.max_cells) break;
    Cell cell = top;
    queue.pop();
    std::size_t axis = 0;
    for (std::size_t j = 1; j < n; ++j)
      if (cell.h[j] * col_norm[j] > cell.h[axis] * col_norm[axis]) axis = j;
    for (double sg : {-1.0, 1.0}) {
      Vec c = cell.c, h = cell.h;
      h[axis] /= 2.0;
      c[axis] += sg * h[axis];
      if (!box_meets_ball(t.source(), c, h)) continue;
      queue.push(make(std::move(c), std::move(h)));
      ++cells;
    }
  }
  const double upper = queue.empty() ? lower : std::max(lower, queue.top().bound);
  if (queue.empty()) converged = true;
  return {lower, upper};
}

}  // namespace

OperatorNormEstimate operator_norm_bounds(const LinearOperator& t, const NormBudget& b, std::uint64_t seed) {
  if (t.is_zero()) return {0.0, 0.0, "zero", true};
  OperatorNormEstimate est;
  est.lower = ascent_lower(t, b, seed);
  est.upper = std::numeric_limits<double>::infinity();
  std::string up_method;
  auto offer = [&](double u, const char* tag) {
    if (u < est.upper) {
      est.upper = u;
      up_method = tag;
    }
  };
  if (auto cf = t.closed_form_norm()) offer(*cf, "closed-form");
  const auto& x = t.source();
  const double gy = t.target().gamma().value();
  if (x.norm().family() == Family::LpGamma && x.norm().p() <= gy) {
    // ‖Tx‖^γ <= Σ|x_j|^γ ‖Te_j‖^γ <= max_j ‖Te_j‖^γ on B_{ℓ_p}, p <= γ.
    double m = 0.0;
    for (std::size_t j = 0; j < t.source_dim(); ++j) m = std::max(m, t.target().eval(t.column(j)));
    offer(m, "vertex");
  }
  if (b.net_delta > 0.0 && x.dim() <= 6) {
    const double h = spacing_for_delta(x, b.net_delta);
    const LatticeNet net = lattice_net(x, h, b.net_points);
    Vec buf(t.target_dim());
    double m = 0.0;
    for (std::size_t i = 0; i < net.points.size(); ++i) {
      const double v = image_norm(t, net.points.row(i), buf);
      m = std::max(m, v);
      const double nx = x.eval(net.points.row(i));
      if (nx > 0.0 && nx <= 1.0) est.lower = std::max(est.lower, v / nx);
    }
    Vec half(x.dim(), h / 2.0);
    double u = gpow(gpow(m, gy) + gpow(image_box_radius(t, half), gy), 1.0 / gy);
    const double dg = gpow(net.delta, gy);
    if (dg < 1.0) u = std::min(u, m * gpow(1.0 / (1.0 - dg), 1.0 / gy));
    offer(u, "net");
  }
  if (!std::isfinite(est.upper) || est.upper > est.lower * (1.0 + b.rel_tol)) {
    bool conv = false;
    auto [lo, up] = box_bound(t, b, est.lower, conv);
    est.lower = std::max(est.lower, lo);
    offer(up, "box-bnb");
  }
  if (est.lower > est.upper) {
    if (est.lower > est.upper * (1.0 + 1e-12))
      throw Error("operator norm lower bound exceeds certified upper bound");
    est.upper = est.lower;
  }
  est.converged = est.upper <= est.lower * (1.0 + std::max(b.rel_tol, 1e-12));
  est.method = "lower=ascent;upper=" + up_method + (est.converged ? "" : ";gap");
  return est;
}

}  // namespace qbent
