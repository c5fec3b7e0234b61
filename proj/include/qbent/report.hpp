#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace qbent {

/// Empty cells are std::monostate.
using Cell = std::variant<std::monostate, std::string, double, long long, bool>;

struct Table {
  std::string schema;  // e.g. "entropy"; written as `# schema=entropy v1`
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline constexpr int kSchemaVersion = 1;

/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_sig17(double v);
std::uint64_t fnv1a64(const std::string& s);
std::string hash_hex(std::uint64_t h);

/// A trailing `config_hash` column is added to every row.
std::string to_csv(const Table& t, const std::string& config_hash);
std::string to_json(const Table& t, const std::string& config_hash);

extern const std::vector<std::string> kEntropyColumns;
extern const std::vector<std::string> kEmbedColumns;
extern const std::vector<std::string> kNormCheckColumns;

}  // namespace qbent
