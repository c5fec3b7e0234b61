#include "qbent/gnorm.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <limits>

#include "qbent/random.hpp"

namespace qbent {

namespace {

constexpr std::size_t kStackDim = 64;

// Calls f(sorted) with |v| sorted non-increasing, on the stack when small.
template <class F>
double with_rearrangement(VecView v, F&& f) {
  if (v.size() <= kStackDim) {
    std::array<double, kStackDim> buf;
    for (std::size_t i = 0; i < v.size(); ++i) buf[i] = std::fabs(v[i]);
    std::sort(buf.begin(), buf.begin() + v.size(), std::greater<>());
    return f(std::span<const double>(buf.data(), v.size()));
  }
  Vec buf(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) buf[i] = std::fabs(v[i]);
  std::sort(buf.begin(), buf.end(), std::greater<>());
  return f(std::span<const double>(buf));
}

double lp_sorted(double p, std::span<const double> s) {
  double acc = 0.0;
  for (double t : s) acc += gpow(t, p);
  return gpow(acc, 1.0 / p);
}

double lorentz_sorted(double p, double r, std::span<const double> s) {
  if (std::isinf(r)) {
    double best = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j)
      best = std::max(best, gpow(static_cast<double>(j + 1), 1.0 / p) * s[j]);
    return best;
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j)
    acc += gpow(gpow(static_cast<double>(j + 1), 1.0 / p - 1.0 / r) * s[j], r);
  return gpow(acc, 1.0 / r);
}

void check_lorentz_params(double p, double r) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("Lorentz p must be a positive finite real");
  if (!(r > 0.0)) throw DomainError("Lorentz r must be positive or inf");
}

double eval_unchecked(const NormSpec& s, VecView v);

double eval_tau(const NormSpec& s, VecView v) {
  const auto f = s.factors();
  Vec u(f.size());
  std::size_t off = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    u[i] = eval_unchecked(f[i], v.subspan(off, f[i].dim()));
    off += f[i].dim();
  }
  return eval_unchecked(s.outer(), u);
}

double eval_unchecked(const NormSpec& s, VecView v) {
  const double g = s.certified_gamma().value();
  switch (s.family()) {
    case Family::LpGamma:
      return with_rearrangement(v, [&](auto sorted) { return lp_sorted(s.p(), sorted); });
    case Family::Sup: {
      double m = 0.0;
      for (double c : v) m = std::max(m, std::fabs(c));
      return m;
    }
    case Family::Lorentz:
      return with_rearrangement(v, [&](auto sorted) { return lorentz_sorted(s.p(), s.r(), sorted); });
    case Family::Phi:
      return phi_norm(GammaExponent(g), v[0], v[1]);
    case Family::Omega:
      return omega_norm(GammaExponent(g), v[0], v[1]);
    case Family::Theta:
      return omega_norm(GammaExponent(g), std::fabs(v[0]), eval_unchecked(s.inner(), v.subspan(1)));
    case Family::Tau:
      return eval_tau(s, v);
  }
  return 0.0;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::LpGamma: return "lp";
    case Family::Lorentz: return "lorentz";
    case Family::Phi: return "phi";
    case Family::Omega: return "omega";
    case Family::Theta: return "theta";
    case Family::Tau: return "tau";
    case Family::Sup: return "sup";
  }
  return "?";
}

NormSpec NormSpec::lp(double p, std::size_t dim) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("lp exponent must be a positive finite real");
  if (dim < 1) throw DimensionError("dim must be >= 1");
  NormSpec s;
  s.family_ = Family::LpGamma;
  s.dim_ = dim;
  s.p_ = p;
  s.gamma_ = GammaExponent(std::min(p, 1.0));
  return s;
}

NormSpec NormSpec::sup(std::size_t dim) {
  if (dim < 1) throw DimensionError("dim must be >= 1");
  NormSpec s;
  s.family_ = Family::Sup;
  s.dim_ = dim;
  s.p_ = std::numeric_limits<double>::infinity();
  return s;
}

NormSpec NormSpec::lorentz(double p, double r, std::size_t dim, std::optional<double> gamma) {
  check_lorentz_params(p, r);
  if (dim < 1) throw DimensionError("dim must be >= 1");
  const double cap = std::min({p, r, 1.0});
  const double g = gamma.value_or(cap / 2.0);
  if (g > cap) throw DomainError("Lorentz certified gamma may not exceed min(p, r, 1)");
  NormSpec s;
  s.family_ = Family::Lorentz;
  s.dim_ = dim;
  s.p_ = p;
  s.r_ = r;
  s.gamma_ = GammaExponent(g);
  const double worst = gamma_triangle_sweep(s, g, 4096, 0x10e27ULL);
  if (worst > 1e-9)
    throw DomainError("Lorentz spec fails the gamma-triangle test at gamma=" + std::to_string(g));
  return s;
}

NormSpec NormSpec::phi(GammaExponent g) {
  NormSpec s;
  s.family_ = Family::Phi;
  s.dim_ = 2;
  s.gamma_ = g;
  return s;
}

NormSpec NormSpec::omega(GammaExponent g) {
  NormSpec s;
  s.family_ = Family::Omega;
  s.dim_ = 2;
  s.gamma_ = g;
  return s;
}

NormSpec NormSpec::theta(GammaExponent g, const NormSpec& inner) {
  if (inner.certified_gamma().value() != 1.0) throw DomainError("theta requires a normed inner space");
  NormSpec s;
  s.family_ = Family::Theta;
  s.dim_ = 1 + inner.dim();
  s.gamma_ = g;
  s.children_ = std::make_shared<const std::vector<NormSpec>>(std::vector<NormSpec>{inner});
  return s;
}

NormSpec NormSpec::tau(const NormSpec& outer, const std::vector<NormSpec>& factors) {
  if (factors.size() != outer.dim()) throw DimensionError("tau needs one factor per outer coordinate");
  std::vector<NormSpec> kids{outer};
  std::size_t dim = 0;
  for (const auto& f : factors) {
    if (f.certified_gamma().value() != 1.0) throw DomainError("tau factors must be normed spaces");
    dim += f.dim();
    kids.push_back(f);
  }
  NormSpec s;
  s.family_ = Family::Tau;
  s.dim_ = dim;
  s.gamma_ = outer.certified_gamma();
  s.children_ = std::make_shared<const std::vector<NormSpec>>(std::move(kids));
  return s;
}

const NormSpec& NormSpec::inner() const {
  if (family_ != Family::Theta) throw DomainError("inner() only exists for theta");
  return (*children_)[0];
}

const NormSpec& NormSpec::outer() const {
  if (family_ != Family::Tau) throw DomainError("outer() only exists for tau");
  return (*children_)[0];
}

std::vector<NormSpec> NormSpec::factors() const {
  if (family_ != Family::Tau) throw DomainError("factors() only exists for tau");
  return {children_->begin() + 1, children_->end()};
}

bool NormSpec::is_monotone() const {
  switch (family_) {
    case Family::LpGamma:
    case Family::Sup:
    case Family::Lorentz:
      return true;
    case Family::Tau:
      return outer().is_monotone() &&
             std::all_of(children_->begin() + 1, children_->end(), [](const NormSpec& f) { return f.is_monotone(); });
    default:
      return false;
  }
}

bool NormSpec::is_unconditional() const {
  switch (family_) {
    case Family::Phi:
      return false;
    case Family::Theta:
      return inner().is_unconditional();
    case Family::Tau:
      return std::all_of(children_->begin() + 1, children_->end(),
                         [](const NormSpec& f) { return f.is_unconditional(); });
    default:
      return true;
  }
}

bool operator==(const NormSpec& a, const NormSpec& b) {
  if (a.family_ != b.family_ || a.dim_ != b.dim_ || !(a.gamma_ == b.gamma_)) return false;
  if (a.family_ == Family::LpGamma || a.family_ == Family::Lorentz)
    if (a.p_ != b.p_ || a.r_ != b.r_) return false;
  if (static_cast<bool>(a.children_) != static_cast<bool>(b.children_)) return false;
  return !a.children_ || *a.children_ == *b.children_;
}

double eval_norm(const NormSpec& spec, VecView v) {
  if (v.size() != spec.dim())
    throw DimensionError("vector dim " + std::to_string(v.size()) + " != spec dim " + std::to_string(spec.dim()));
  require_finite(v);
  return eval_unchecked(spec, v);
}

double phi_norm(GammaExponent g, double x1, double x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2)) throw DomainError("non-finite coordinate");
  const bool opposite = (x1 <= 0.0 && x2 >= 0.0) || (x1 >= 0.0 && x2 <= 0.0);
  if (opposite) return std::fabs(x1) + std::fabs(x2);
  const double gv = g.value();
  return gpow(gpow(std::fabs(x1), gv) + gpow(std::fabs(x2), gv), 1.0 / gv);
}

double omega_norm(GammaExponent g, double x1, double x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2)) throw DomainError("non-finite coordinate");
  if (std::fabs(x1) > std::fabs(x2)) return std::fabs(x1);
  const double gv = g.value();
  const double s = gpow(std::fabs(x1 + x2) / 2.0, gv) + gpow(std::fabs(x1 - x2) / 2.0, gv);
  return gpow(s, 1.0 / gv);
}

double theta_norm(GammaExponent g, double xi, double inner_norm_value) {
  if (!(inner_norm_value >= 0.0)) throw DomainError("inner norm value must be nonnegative");
  return omega_norm(g, std::fabs(xi), inner_norm_value);
}

double tau_product_norm(const NormSpec& outer, const std::vector<NormSpec>& factors, const std::vector<Vec>& x) {
  if (x.size() != outer.dim() || factors.size() != outer.dim())
    throw DimensionError("tau needs one block per outer coordinate");
  Vec u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = eval_norm(factors[i], x[i]);
  return eval_norm(outer, u);
}

double lorentz_norm(double p, double r, VecView v) {
  check_lorentz_params(p, r);
  require_finite(v);
  return with_rearrangement(v, [&](auto sorted) { return lorentz_sorted(p, r, sorted); });
}

Vec rearrange_decreasing(VecView v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::fabs(v[i]);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double gamma_triangle_residual(const NormSpec& spec, VecView x, VecView y) {
  if (x.size() != y.size()) throw DimensionError("residual needs equal dims");
  Vec s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] + y[i];
  const double g = spec.certified_gamma().value();
  return gpow(eval_norm(spec, s), g) - gpow(eval_norm(spec, x), g) - gpow(eval_norm(spec, y), g);
}

GammaExponent aoki_rolewicz_gamma(double c) {
  if (!(c >= 1.0) || !std::isfinite(c)) throw DomainError("quasi-norm constant must be >= 1");
  return GammaExponent(1.0 / (1.0 + std::log2(c)));
}

namespace {

// One random test vector. The shape cycles through dense, sparse, flat and
// decaying patterns since γ-triangle extremals tend to be sparse or flat.
void draw_vector(Rng& rng, Vec& v, int shape) {
  const std::size_t n = v.size();
  std::fill(v.begin(), v.end(), 0.0);
  switch (shape) {
    case 0:
      for (auto& c : v) c = rng.normal();
      break;
    case 1:
      v[rng.index(n)] = rng.normal();
      break;
    case 2:
      v[rng.index(n)] = rng.normal();
      v[rng.index(n)] += rng.normal();
      break;
    case 3:
      for (auto& c : v) c = rng.sign();
      break;
    case 4:
      for (std::size_t i = 0; i < n; ++i) v[i] = rng.sign() / static_cast<double>(1 + rng.index(n));
      break;
    default:
      for (auto& c : v) c = rng.uniform(-1.0, 1.0) * std::exp(rng.uniform(-6.0, 6.0));
      break;
  }
}

}  // namespace

double gamma_triangle_sweep(const NormSpec& spec, double gamma, std::size_t trials, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = spec.dim();
  Vec x(n), y(n), s(n);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    draw_vector(rng, x, static_cast<int>(rng.index(6)));
    switch (t % 4) {
      case 0:
        draw_vector(rng, y, static_cast<int>(rng.index(6)));
        break;
      case 1: {
        const double lam = rng.uniform(-2.0, 2.0);
        for (std::size_t i = 0; i < n; ++i) y[i] = lam * x[i];
        break;
      }
      case 2:
        for (std::size_t i = 0; i < n; ++i) y[i] = rng.sign() * std::fabs(x[(i + 1) % n]) * rng.uniform(0.5, 1.5);
        break;
      default:
        draw_vector(rng, y, static_cast<int>(rng.index(6)));
        for (std::size_t i = 0; i < n; ++i) y[i] *= std::exp(rng.uniform(-8.0, 8.0));
        break;
    }
    for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + y[i];
    const double nx = gpow(eval_unchecked(spec, x), gamma);
    const double ny = gpow(eval_unchecked(spec, y), gamma);
    const double ns = gpow(eval_unchecked(spec, s), gamma);
    worst = std::max(worst, (ns - nx - ny) / std::max({nx, ny, 1.0}));
  }
  return worst;
}

}  // namespace qbent
