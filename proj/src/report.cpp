#include "qbent/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "qbent/common.hpp"

namespace qbent {

const std::vector<std::string> kEntropyColumns{"k",           "f_lower",      "e_lower", "e_upper", "theory_lower",
                                               "theory_upper", "method",       "claim",   "pass"};
const std::vector<std::string> kEmbedColumns{"n",     "k",   "e_lower",   "e_upper", "phi_ratio", "reference",
                                             "ratio", "psi", "fit_slope", "method"};
const std::vector<std::string> kNormCheckColumns{"family", "check", "trials", "max_residual", "tolerance", "pass"};

std::string format_sig17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string csv_cell(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
    std::string operator()(double d) const { return format_sig17(d); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  } visit;
  return std::visit(visit, c);
}

void check_shape(const Table& t) {
  for (const auto& r : t.rows)
    if (r.size() != t.columns.size()) throw DimensionError("table row width does not match the header");
}

}  // namespace

std::string to_csv(const Table& t, const std::string& config_hash) {
  check_shape(t);
  std::ostringstream out;
  out << "# schema=" << t.schema << " v" << kSchemaVersion << '\n';
  for (const auto& c : t.columns) out << c << ',';
  out << "config_hash\n";
  for (const auto& r : t.rows) {
    for (const auto& c : r) out << csv_cell(c) << ',';
    out << config_hash << '\n';
  }
  return out.str();
}

std::string to_json(const Table& t, const std::string& config_hash) {
  check_shape(t);
  nlohmann::ordered_json doc;
  doc["schema"] = t.schema;
  doc["version"] = kSchemaVersion;
  doc["config_hash"] = config_hash;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto& c = r[i];
      auto& slot = row[t.columns[i]];
      if (std::holds_alternative<std::monostate>(c)) slot = nullptr;
      else if (auto* s = std::get_if<std::string>(&c)) slot = *s;
      else if (auto* d = std::get_if<double>(&c)) {
        // JSON has no non-finite numbers; those go out as strings.
        if (std::isfinite(*d)) slot = *d;
        else slot = format_sig17(*d);
      } else if (auto* v = std::get_if<long long>(&c)) slot = *v;
      else slot = std::get<bool>(c);
    }
    row["config_hash"] = config_hash;
    doc["rows"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

}  // namespace qbent
