#include "qbent/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "qbent/entropy.hpp"
#include "qbent/norm_spec_io.hpp"
#include "qbent/random.hpp"
#include "qbent/sharpness.hpp"

namespace qbent {

namespace {

std::string opt_text(const std::optional<double>& v) { return v ? format_real(*v) : "-"; }

}  // namespace

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv{
      {"command", command},
      {"gamma", format_real(gamma)},
      {"p", format_real(p)},
      {"q", format_real(q)},
      {"r", opt_text(r)},
      {"s", opt_text(s)},
      {"dim", std::to_string(dim)},
      {"k_max", std::to_string(k_max)},
      {"samples", std::to_string(samples)},
      {"net_delta", opt_text(net_delta)},
      {"seed", std::to_string(seed)},
      {"format", format},
      {"family", family},
      {"spec", spec},
      {"target", target},
      {"trials", std::to_string(trials)},
      {"operator", op},
      {"matrix", matrix},
      {"claim", claim},
      {"alpha", format_real(alpha)},
      {"beta", format_real(beta)},
      {"m", m ? std::to_string(*m) : "-"},
      {"a", format_real(a)},
      {"grid", std::to_string(grid)},
      {"n_min", std::to_string(n_min)},
      {"n_max", std::to_string(n_max)},
      {"k_span", std::to_string(k_span)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::hash() const { return hash_hex(fnv1a64(canonical())); }

namespace {

EstimatorBudget budget_of(const RunConfig& c) {
  EstimatorBudget b;
  b.samples = c.samples;
  if (c.net_delta) b.net_delta = *c.net_delta;
  return b;
}

SpaceSpec lp_or_lorentz(double p, const std::optional<double>& r, std::size_t n) {
  if (r) return SpaceSpec::lorentz(p, *r, n);
  if (std::isinf(p)) return SpaceSpec::sup(n);
  return SpaceSpec::lp(p, n);
}

NormSpec norm_for_check(const RunConfig& c) {
  if (!c.spec.empty()) return parse_norm_spec(c.spec);
  const std::string& f = c.family;
  if (f == "lp") return std::isinf(c.p) ? NormSpec::sup(c.dim) : NormSpec::lp(c.p, c.dim);
  if (f == "sup") return NormSpec::sup(c.dim);
  if (f == "lorentz") return NormSpec::lorentz(c.p, c.r.value_or(2.0), c.dim);
  if (f == "phi") return NormSpec::phi(GammaExponent(c.gamma));
  if (f == "omega") return NormSpec::omega(GammaExponent(c.gamma));
  if (f == "theta") return NormSpec::theta(GammaExponent(c.gamma), NormSpec::lp(c.p, c.dim));
  throw ParseError("unknown family '" + f + "' (expected lp, sup, lorentz, phi, omega, theta, or --spec)");
}

void add_check(Table& t, const std::string& fam, const std::string& check, std::size_t trials, double resid,
               double tol, bool& all) {
  const bool ok = resid <= tol;
  all = all && ok;
  t.rows.push_back({fam, check, static_cast<long long>(trials), resid, tol, ok});
}

std::optional<TheoryBand> band_for(const RunConfig& c, const LinearOperator& t, int k, std::string& claim, bool& contain) {
  contain = false;
  switch (t.form()) {
    case OperatorForm::Embedding:
      if (t.source() == t.target() && t.source().pinned().empty()) {
        claim = "identity-band";
        contain = true;
        return identity_band(t.source_dim(), t.target().gamma(), k);
      }
      return std::nullopt;
    case OperatorForm::SharpT:
      claim = "sharp-t";
      return TheoryBand{1.0, 1.0, "sharp"};
    case OperatorForm::TildeT:
      if (k != 1) return std::nullopt;
      claim = "segment-cover";
      return TheoryBand{1.0, 1.0, "sharp"};
    case OperatorForm::Tinf:
      claim = "injection-tinf";
      return TheoryBand{0.5, 0.5 + std::exp2(1.0 - k), "example"};
    case OperatorForm::T0:
      claim = "injection-t0";
      return TheoryBand{0.0, GammaExponent(c.gamma).quasi_constant(), "example"};
    default:
      return std::nullopt;
  }
}

LinearOperator operator_for(const RunConfig& c) {
  const GammaExponent g(c.gamma);
  const std::string& o = c.op;
  if (o == "identity") {
    const SpaceSpec x = c.spec.empty() ? lp_or_lorentz(c.p, c.r, c.dim) : SpaceSpec::of(parse_norm_spec(c.spec));
    return make_embedding(x, x);
  }
  if (o == "embedding") return make_embedding(lp_or_lorentz(c.p, c.r, c.dim), lp_or_lorentz(c.q, c.s, c.dim));
  if (o == "tilde-t") return make_structured_operator(OperatorForm::TildeT, g, 1.0, 1);
  if (o == "sharp-t") return make_structured_operator(OperatorForm::SharpT, g, c.p, c.dim);
  if (o == "t0") return make_structured_operator(OperatorForm::T0, g, 1.0, c.dim);
  if (o == "tinf") return make_structured_operator(OperatorForm::Tinf, g, 1.0, c.dim);
  if (o == "projection") return make_structured_operator(OperatorForm::ProjectionP, g, c.p, c.dim, c.m.value_or(0));
  if (o == "injection") return make_structured_operator(OperatorForm::InjectionJ, g, c.p, c.dim, c.m.value_or(0));
  if (o == "matrix") {
    if (c.matrix.empty()) throw ParseError("--operator matrix needs --matrix FILE");
    std::ifstream in(c.matrix);
    if (!in) throw BudgetError("cannot open matrix file " + c.matrix);
    Eigen::MatrixXd a = parse_matrix(in);
    const auto cols = static_cast<std::size_t>(a.cols()), rows = static_cast<std::size_t>(a.rows());
    SpaceSpec x = c.spec.empty() ? lp_or_lorentz(c.p, c.r, cols) : SpaceSpec::of(parse_norm_spec(c.spec));
    SpaceSpec y = c.target.empty() ? lp_or_lorentz(c.p, c.r, rows) : SpaceSpec::of(parse_norm_spec(c.target));
    return LinearOperator::dense(std::move(a), std::move(x), std::move(y));
  }
  throw ParseError("unknown operator '" + o + "'");
}

void push_report(Table& t, const SharpnessReport& r, bool& all) {
  all = all && r.pass;
  t.rows.push_back({static_cast<long long>(r.k), r.f_lower, r.measured_lower, r.measured_upper, r.target_lower,
                    r.target_upper, r.method, r.claim, r.pass});
}

void push_scalar(Table& t, const std::string& claim, double value, double lo, double hi, const std::string& method,
                 bool& all) {
  const bool ok = value >= lo && value <= hi;
  all = all && ok;
  t.rows.push_back({Cell{}, Cell{}, value, value, lo, hi, method, claim, ok});
}

}  // namespace

CommandResult cmd_norm_check(const RunConfig& c) {
  const NormSpec spec = norm_for_check(c);
  const std::string fam = family_name(spec.family());
  CommandResult res;
  res.table = {"norm-check", kNormCheckColumns, {}};
  bool all = true;
  const double g = spec.certified_gamma().value();
  add_check(res.table, fam, "gamma-triangle", c.trials, gamma_triangle_sweep(spec, g, c.trials, c.seed), 1e-9, all);

  Rng rng(c.seed, 1);
  double homog = 0.0;
  const std::size_t htrials = std::max<std::size_t>(c.trials / 10, 1);
  Vec v(spec.dim()), w(spec.dim());
  for (std::size_t t = 0; t < htrials; ++t) {
    for (auto& x : v) x = rng.normal() * std::exp2(rng.uniform(-8, 8));
    const double lam = rng.sign() * std::exp2(rng.uniform(-20, 20));
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = lam * v[i];
    const double base = std::fabs(lam) * eval_norm(spec, v);
    if (base > 0.0) homog = std::max(homog, std::fabs(eval_norm(spec, w) - base) / base);
  }
  add_check(res.table, fam, "homogeneity", htrials, homog, 1e-12, all);
  add_check(res.table, fam, "zero", 1, eval_norm(spec, Vec(spec.dim(), 0.0)), 0.0, all);
  if (spec.is_unconditional())
    add_check(res.table, fam, "unconditional", 2000, check_unconditional(SpaceSpec::of(spec), 2000, c.seed), 1e-9, all);
  if (spec.family() == Family::Omega || spec.family() == Family::Phi) {
    const GammaExponent ge = spec.certified_gamma();
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i)
      for (int j = 0; j <= 400; ++j) {
        const double x1 = -4.0 + 0.02 * i, x2 = -4.0 + 0.02 * j;
        const double a = omega_norm(ge, x1, x2), b = phi_norm(ge, (x1 + x2) / 2, (x2 - x1) / 2);
        worst = std::max(worst, std::fabs(a - b) / std::max(1.0, a));
      }
    add_check(res.table, fam, "omega-phi-rotation", 401 * 401, worst, 1e-12, all);
  }
  res.code = all ? kExitPass : kExitFail;
  return res;
}

CommandResult cmd_entropy(const RunConfig& c) {
  const LinearOperator t = operator_for(c);
  const EntropyTable tab = entropy_bounds_table(t, c.k_max, budget_of(c), c.seed);
  CommandResult res;
  res.table = {"entropy", kEntropyColumns, {}};
  bool all = true;
  for (const auto& r : tab.rows) {
    std::string claim;
    bool contain = false;
    const auto band = band_for(c, t, r.k, claim, contain);
    std::vector<Cell> row{static_cast<long long>(r.k), r.f_lower, r.e_lower, r.e_upper, Cell{}, Cell{},
                          "f:" + r.f_method + ";lower:" + r.lower_method + ";upper:" + r.upper_method, claim, Cell{}};
    if (band) {
      row[4] = band->lower;
      row[5] = band->upper;
      const bool ok = contain ? r.e_lower >= band->lower - 1e-9 && r.e_upper <= band->upper
                              : r.e_lower <= band->upper + 1e-9 && r.e_upper >= band->lower - 1e-9;
      row[8] = ok;
      all = all && ok;
    }
    res.table.rows.push_back(std::move(row));
  }
  res.code = all ? kExitPass : kExitFail;
  return res;
}

CommandResult cmd_sharpness(const RunConfig& c) {
  const GammaExponent g(c.gamma);
  const EstimatorBudget b = budget_of(c);
  CommandResult res;
  res.table = {"sharpness", kEntropyColumns, {}};
  bool all = true;
  const std::string& cl = c.claim;
  if (cl == "packing-constant") {
    for (int k = 1; k <= c.k_max; ++k)
      push_report(res.table, verify_packing_constant(g, k, c.m.value_or((std::size_t{1} << (k - 1)) + 1)), all);
  } else if (cl == "segment-cover") {
    push_report(res.table, verify_segment_cover(g, c.net_delta.value_or(1e-6)), all);
  } else if (cl == "sharp-t") {
    for (const auto& r : verify_sharp_t(g, c.p, c.m.value_or(16), c.k_max, b, c.seed)) push_report(res.table, r, all);
  } else if (cl == "injection-sections") {
    for (int k = 2; k <= c.k_max; ++k)
      for (const auto& r : verify_injection_sections(g, c.m.value_or(16), k, b, mix_seed(c.seed, k)))
        push_report(res.table, r, all);
  } else if (cl == "metric-injection") {
    const std::size_t m = c.m.value_or(16);
    const auto t0 = make_structured_operator(OperatorForm::T0, g, 1.0, m);
    // Same norm without the pinned coordinate, so ι∘T0 is the T∞ map.
    const auto full = SpaceSpec::of(t0.target().norm());
    const auto iota = LinearOperator::dense(Eigen::MatrixXd::Identity(m + 1, m + 1), full, full);
    for (const auto& r : verify_metric_injection(t0, iota, c.k_max, b, c.seed)) push_report(res.table, r, all);
  } else if (cl == "three-point-constants") {
    const AlphaBetaGamma abg(c.alpha, c.beta, g);
    push_scalar(res.table, "constant-A", constant_A(abg), 2.0, INFINITY, "closed-form", all);
    push_scalar(res.table, "constant-B", constant_B(abg), 1.0, INFINITY, "closed-form", all);
    push_scalar(res.table, "constant-C", constant_C(abg), std::exp2(1.0 - 1.0 / g.value()), INFINITY, "closed-form", all);
    push_scalar(res.table, "pair-residual", pair_residual_sweep(abg, c.trials, c.seed), -1e-9, INFINITY,
                "sweep:" + std::to_string(c.trials), all);
  } else if (cl == "g-monotone") {
    const GMonotone gm = g_monotone_residual(c.a, g, c.grid);
    push_scalar(res.table, "g-monotone-increase", gm.increase, -INFINITY, 1e-9, "grid:" + std::to_string(c.grid), all);
    push_scalar(res.table, "g-monotone-evenness", gm.odd_part, -INFINITY, 1e-12, "grid:" + std::to_string(c.grid), all);
  } else {
    throw ParseError("unknown claim '" + cl + "' (packing-constant, segment-cover, sharp-t, injection-sections, metric-injection, three-point-constants, g-monotone)");
  }
  res.code = all ? kExitPass : kExitFail;
  return res;
}

CommandResult cmd_embedding_table(const RunConfig& c) {
  if (!(c.p < c.q)) throw DomainError("embed-table needs p < q");
  if (c.n_min < 1 || c.n_min > c.n_max) throw DomainError("embed-table needs 1 <= n-min <= n-max");
  const EstimatorBudget b = budget_of(c);
  CommandResult res;
  res.table = {"embed-table", kEmbedColumns, {}};
  for (std::size_t n = c.n_min; n <= c.n_max; ++n) {
    const SpaceSpec x = lp_or_lorentz(c.p, c.r, n), y = lp_or_lorentz(c.q, c.s, n);
    const auto t = make_embedding(x, y);
    const int nn = static_cast<int>(n);
    const EntropyTable tab = entropy_bounds_table(t, nn + c.k_span, b, mix_seed(c.seed, n));
    const double ratio = fundamental_function(y, n) / fundamental_function(x, n);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& r : tab.rows) {
      const double ref = std::exp2(-static_cast<double>(r.k) / n) * ratio;
      Cell ps{};
      if (r.k <= nn) ps = psi(r.k, nn, c.p, c.q);
      res.table.rows.push_back({static_cast<long long>(n), static_cast<long long>(r.k), r.e_lower, r.e_upper, ratio,
                                ref, r.e_upper / ref, ps, Cell{}, "lower:" + r.lower_method + ";upper:" + r.upper_method});
      if (r.k >= nn) {
        const double lx = r.k, ly = std::log2(r.e_upper);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
      }
    }
    const double slope = cnt > 1 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
    res.table.rows.push_back({static_cast<long long>(n), Cell{}, Cell{}, Cell{}, ratio, Cell{}, Cell{}, Cell{}, slope,
                              "fit:log2(e_upper)~k,k=n..n+" + std::to_string(c.k_span) +
                                  ";expected=" + format_sig17(-1.0 / n)});
  }
  return res;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path + ":" + std::to_string(no) + ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified entropy-number bounds for operators between quasi-Banach spaces"};
  app.require_subcommand(1);
  RunConfig cfg;
  double r = 0, s = 0, net_delta = 0;
  std::size_t m = 0;
  std::string config_path;

  auto shared = [&](CLI::App* sub) {
    sub->add_option("--gamma", cfg.gamma, "gamma exponent in (0, 1]");
    sub->add_option("--dim", cfg.dim, "dimension / section size");
    sub->add_option("--k-max", cfg.k_max, "largest entropy index");
    sub->add_option("--samples", cfg.samples, "packing sample count");
    sub->add_option("--net-delta", net_delta, "source delta of the covering net");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--config", config_path, "key=value file; flags take precedence");
    sub->add_option("--p", cfg.p, "source exponent");
    sub->add_option("--q", cfg.q, "target exponent");
    sub->add_option("--r", r, "source Lorentz second index");
    sub->add_option("--s", s, "target Lorentz second index");
    sub->add_option("--m", m, "section or ambient dimension");
    sub->add_option("--trials", cfg.trials, "random trials");
  };
  auto* nc = app.add_subcommand("norm-check", "gamma-norm axiom suite for one norm");
  shared(nc);
  nc->add_option("--family", cfg.family, "lp, sup, lorentz, phi, omega, theta");
  nc->add_option("--spec", cfg.spec, "norm spec text, e.g. 'family=lp p=0.5 dim=3'");
  auto* en = app.add_subcommand("entropy", "entropy-number bounds for k = 1..k-max");
  shared(en);
  en->add_option("--operator", cfg.op, "identity, embedding, tilde-t, sharp-t, t0, tinf, projection, injection, matrix");
  en->add_option("--matrix", cfg.matrix, "matrix file");
  en->add_option("--spec", cfg.spec, "source norm spec");
  en->add_option("--target", cfg.target, "target norm spec (matrix operator)");
  auto* sh = app.add_subcommand("sharpness", "verify one sharp-constant claim");
  shared(sh);
  sh->add_option("--claim", cfg.claim, "packing-constant, segment-cover, sharp-t, injection-sections, metric-injection, three-point-constants, g-monotone")->required();
  sh->add_option("--alpha", cfg.alpha);
  sh->add_option("--beta", cfg.beta);
  sh->add_option("--a", cfg.a, "g-monotone centre");
  sh->add_option("--grid", cfg.grid, "g-monotone grid size");
  auto* et = app.add_subcommand("embed-table", "embedding entropy table and decay fit");
  shared(et);
  et->add_option("--n-min", cfg.n_min);
  et->add_option("--n-max", cfg.n_max);
  et->add_option("--k-span", cfg.k_span, "rows run to k = n + k-span");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitPass : kExitUsage;
  }
  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  try {
    if (!config_path.empty()) {
      for (const auto& [key, value] : read_config_file(config_path)) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || key == "config") throw ParseError("unknown config key '" + key + "'");
        if (opt->count() == 0) {
          opt->add_result(value);
          opt->run_callback();
        }
      }
    }
  } catch (const CLI::Error& e) {
    err << "config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  if (sub->get_option("--r")->count()) cfg.r = r;
  if (sub->get_option("--s")->count()) cfg.s = s;
  if (sub->get_option("--net-delta")->count()) cfg.net_delta = net_delta;
  if (sub->get_option("--m")->count()) cfg.m = m;
  if (cfg.format != "csv" && cfg.format != "json") {
    err << "--format must be csv or json\n";
    return kExitUsage;
  }

  CommandResult res;
  try {
    if (cfg.command == "norm-check") res = cmd_norm_check(cfg);
    else if (cfg.command == "entropy") res = cmd_entropy(cfg);
    else if (cfg.command == "sharpness") res = cmd_sharpness(cfg);
    else res = cmd_embedding_table(cfg);
  } catch (const ParseError& e) {
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BudgetError& e) {
    err << "resource: " << e.what() << "\n";
    return kExitResource;
  } catch (const DimensionError& e) {
    err << "resource: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::bad_alloc&) {
    err << "resource: out of memory\n";
    return kExitResource;
  } catch (const Error& e) {
    err << "failure: " << e.what() << "\n";
    return kExitFail;
  }

  const std::string text = cfg.format == "json" ? to_json(res.table, cfg.hash()) : to_csv(res.table, cfg.hash());
  if (cfg.out.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!(f << text)) {
      err << "resource: cannot write " << cfg.out << "\n";
      return kExitResource;
    }
  }
  return res.code;
}

}  // namespace qbent
