#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qbent/report.hpp"

namespace qbent {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2, kExitResource = 3 };

struct RunConfig {
  std::string command;
  double gamma = 0.5;
  double p = 1.0;
  double q = 2.0;
  std::optional<double> r;
  std::optional<double> s;
  std::size_t dim = 3;
  int k_max = 4;
  std::size_t samples = 200000;
  std::optional<double> net_delta;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out;

  std::string family;     // norm-check
  std::string spec;       // norm-check, or entropy source for identity/matrix
  std::string target;     // entropy target spec for matrix
  std::size_t trials = 100000;
  std::string op = "identity";  // entropy
  std::string matrix;     // entropy matrix file
  std::string claim;      // sharpness
  double alpha = 1.5;
  double beta = 1.2;
  std::optional<std::size_t> m;
  double a = 1.0;         // g-monotone
  std::size_t grid = 10001;
  std::size_t n_min = 4;  // embed-table
  std::size_t n_max = 8;
  int k_span = 8;

  /// Sorted key=value text of every field; hashed into each output row.
  std::string canonical() const;
  std::string hash() const;
};

struct CommandResult {
  int code = kExitPass;
  Table table;
};

CommandResult cmd_norm_check(const RunConfig& cfg);
CommandResult cmd_entropy(const RunConfig& cfg);
CommandResult cmd_sharpness(const RunConfig& cfg);
CommandResult cmd_embedding_table(const RunConfig& cfg);

/// Parses `key=value` lines; `#` starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Full command line: parse, run, write the table to --out or `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qbent
