#include "qbent/norm_spec_io.hpp"

#include <charconv>
#include <limits>
#include <map>
#include <optional>

namespace qbent {

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("not a number: '" + std::string(s) + "'");
  return v;
}

namespace {

struct Parser {
  std::string_view src;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos) + " in '" + std::string(src) + "'");
  }
  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  std::string_view token() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < src.size()) {
      const char c = src[pos];
      if (c == ' ' || c == '\t' || c == '=' || c == '(' || c == ')' || c == '[' || c == ']' || c == ',') break;
      ++pos;
    }
    if (pos == start) fail("expected a token");
    return src.substr(start, pos - start);
  }

  NormSpec spec(char terminator) {
    std::map<std::string, std::string, std::less<>> scalars;
    std::optional<NormSpec> inner, outer;
    std::vector<NormSpec> factors;
    while (true) {
      skip_ws();
      if (pos >= src.size() || src[pos] == terminator) break;
      const std::string key(token());
      if (!eat('=')) fail("expected '=' after '" + key + "'");
      if (key == "inner" || key == "outer") {
        if (!eat('(')) fail("expected '(' for " + key);
        NormSpec s = spec(')');
        if (!eat(')')) fail("unbalanced '('");
        (key == "inner" ? inner : outer) = s;
      } else if (key == "factors") {
        if (!eat('[')) fail("expected '[' for factors");
        do {
          if (!eat('(')) fail("expected '(' in factor list");
          factors.push_back(spec(')'));
          if (!eat(')')) fail("unbalanced '('");
        } while (eat(','));
        if (!eat(']')) fail("expected ']'");
      } else {
        if (scalars.count(key)) fail("duplicate key '" + key + "'");
        scalars[key] = std::string(token());
      }
    }
    return build(scalars, inner, outer, factors);
  }

  NormSpec build(const std::map<std::string, std::string, std::less<>>& kv, const std::optional<NormSpec>& inner,
                 const std::optional<NormSpec>& outer, const std::vector<NormSpec>& factors) {
    auto get = [&](const char* k) -> std::optional<double> {
      auto it = kv.find(k);
      if (it == kv.end()) return std::nullopt;
      return parse_real(it->second);
    };
    auto need = [&](const char* k) {
      auto v = get(k);
      if (!v) fail(std::string("missing key '") + k + "'");
      return *v;
    };
    auto fam_it = kv.find("family");
    if (fam_it == kv.end()) fail("missing key 'family'");
    for (const auto& [k, _] : kv)
      if (k != "family" && k != "p" && k != "r" && k != "gamma" && k != "dim") fail("unknown key '" + k + "'");
    const std::string& fam = fam_it->second;
    const auto dim = get("dim");
    auto check_dim = [&](const NormSpec& s) {
      if (dim && *dim != static_cast<double>(s.dim())) fail("dim does not match the family");
      return s;
    };
    auto dim_value = [&]() -> std::size_t {
      const double d = need("dim");
      if (!(d >= 1.0) || d != std::floor(d)) fail("dim must be a positive integer");
      return static_cast<std::size_t>(d);
    };
    if (fam == "lp") {
      const double p = need("p");
      if (std::isinf(p)) return NormSpec::sup(dim_value());
      NormSpec s = NormSpec::lp(p, dim_value());
      if (auto g = get("gamma"); g && *g != s.certified_gamma().value()) fail("lp gamma must equal min(p, 1)");
      return s;
    }
    if (fam == "sup") return NormSpec::sup(dim_value());
    if (fam == "lorentz") return NormSpec::lorentz(need("p"), need("r"), dim_value(), get("gamma"));
    if (fam == "phi") return check_dim(NormSpec::phi(GammaExponent(need("gamma"))));
    if (fam == "omega") return check_dim(NormSpec::omega(GammaExponent(need("gamma"))));
    if (fam == "theta") {
      if (!inner) fail("theta needs inner=(...)");
      return check_dim(NormSpec::theta(GammaExponent(need("gamma")), *inner));
    }
    if (fam == "tau") {
      if (!outer) fail("tau needs outer=(...)");
      return check_dim(NormSpec::tau(*outer, factors));
    }
    fail("unknown family '" + fam + "'");
  }
};

}  // namespace

NormSpec parse_norm_spec(std::string_view text) {
  Parser ps{text};
  NormSpec s = ps.spec('\0');
  ps.skip_ws();
  if (ps.pos != text.size()) ps.fail("trailing input");
  return s;
}

std::string format_norm_spec(const NormSpec& s) {
  const std::string dim = " dim=" + std::to_string(s.dim());
  const std::string gamma = " gamma=" + format_real(s.certified_gamma().value());
  switch (s.family()) {
    case Family::LpGamma:
      return "family=lp p=" + format_real(s.p()) + dim;
    case Family::Sup:
      return "family=sup" + dim;
    case Family::Lorentz:
      return "family=lorentz p=" + format_real(s.p()) + " r=" + format_real(s.r()) + dim + gamma;
    case Family::Phi:
      return "family=phi" + gamma + dim;
    case Family::Omega:
      return "family=omega" + gamma + dim;
    case Family::Theta:
      return "family=theta" + gamma + dim + " inner=(" + format_norm_spec(s.inner()) + ")";
    case Family::Tau: {
      std::string out = "family=tau" + dim + " outer=(" + format_norm_spec(s.outer()) + ") factors=[";
      const auto f = s.factors();
      for (std::size_t i = 0; i < f.size(); ++i) out += (i ? ",(" : "(") + format_norm_spec(f[i]) + ")";
      return out + "]";
    }
  }
  return {};
}

}  // namespace qbent
