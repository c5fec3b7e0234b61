#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qbent/cli.hpp"

using namespace qbent;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qbent");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "qbent-cli-test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::size_t data_rows(const std::string& csv) {
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  return lines - 2;  // schema line and header
}

}  // namespace

TEST_CASE("norm-check exit codes") {
  CHECK(run({"norm-check", "--family", "omega", "--gamma", "0.5", "--trials", "2000"}).code == kExitPass);
  CHECK(run({"norm-check", "--family", "lp", "--p", "2", "--trials", "2000"}).code == kExitPass);
  CHECK(run({"norm-check", "--family", "bogus"}).code == kExitUsage);
  CHECK(run({"norm-check", "--spec", "family=lp p=-1 dim=2"}).code == kExitUsage);
  CHECK(run({"norm-check", "--family", "omega", "--gamma", "1.5"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"norm-check", "--format", "xml"}).code == kExitUsage);
}

TEST_CASE("sharpness exit codes") {
  const auto r = run({"sharpness", "--claim", "three-point-constants", "--alpha", "1.5", "--beta", "1.2", "--gamma", "0.5", "--trials",
                      "2000"});
  CHECK(r.code == kExitPass);
  CHECK(r.out.find("2.0610142714715") != std::string::npos);
  CHECK(run({"sharpness", "--claim", "packing-constant", "--gamma", "0.5"}).code == kExitPass);
  CHECK(run({"sharpness", "--claim", "nonsense"}).code == kExitUsage);
  CHECK(run({"sharpness"}).code == kExitUsage);
  CHECK(run({"sharpness", "--claim", "three-point-constants", "--alpha", "1.1", "--beta", "1.2"}).code == kExitUsage);
  // The T0 section cannot reach 0.8·2^{1/γ-1} from below at k = 2.
  CHECK(run({"sharpness", "--claim", "injection-sections", "--gamma", "0.5", "--m", "8", "--k-max", "2", "--samples", "5000"})
            .code == kExitFail);
}

TEST_CASE("entropy command and matrix files") {
  const auto id = run({"entropy", "--operator", "identity", "--p", "0.5", "--dim", "2", "--k-max", "3", "--samples",
                       "5000"});
  CHECK(id.code == kExitPass);
  CHECK(data_rows(id.out) == 3);
  CHECK(id.out.rfind("# schema=entropy v1\n", 0) == 0);
  const auto zero = scratch("zero.txt", "2 2\n0 0\n0 0\n");
  const auto z = run({"entropy", "--operator", "matrix", "--matrix", zero.string(), "--k-max", "2"});
  CHECK(z.code == kExitPass);
  CHECK(z.out.find("zero") != std::string::npos);
  CHECK(run({"entropy", "--operator", "matrix", "--matrix", "/nonexistent/m.txt"}).code == kExitResource);
  const auto bad = scratch("bad.txt", "2 2\n1 2\n3\n");
  CHECK(run({"entropy", "--operator", "matrix", "--matrix", bad.string()}).code == kExitUsage);
  const auto wide = scratch("wide.txt", "1 3\n1 2 3\n");
  CHECK(run({"entropy", "--operator", "matrix", "--matrix", wide.string(), "--spec", "family=lp p=1 dim=2"}).code ==
        kExitResource);
  CHECK(run({"entropy", "--operator", "matrix"}).code == kExitUsage);
  CHECK(run({"entropy", "--operator", "warp"}).code == kExitUsage);
  CHECK(run({"entropy", "--k-max", "0"}).code == kExitUsage);
  CHECK(run({"embed-table", "--p", "2", "--q", "1"}).code == kExitUsage);
}

TEST_CASE("config file precedence") {
  const std::vector<std::string> base{"entropy", "--operator", "identity", "--p", "1", "--dim", "1", "--samples", "2000"};
  CHECK(data_rows(run(base).out) == 4);
  const auto cfg = scratch("run.cfg", "# comment\nk-max=3\n\nseed = 9\n");
  auto with_cfg = base;
  with_cfg.insert(with_cfg.end(), {"--config", cfg.string()});
  const auto r3 = run(with_cfg);
  CHECK(r3.code == kExitPass);
  CHECK(data_rows(r3.out) == 3);
  with_cfg.insert(with_cfg.end(), {"--k-max", "2"});
  CHECK(data_rows(run(with_cfg).out) == 2);
  const auto unknown = scratch("unknown.cfg", "colour=blue\n");
  auto u = base;
  u.insert(u.end(), {"--config", unknown.string()});
  CHECK(run(u).code == kExitUsage);
  const auto junk = scratch("junk.cfg", "just words\n");
  u.back() = junk.string();
  CHECK(run(u).code == kExitUsage);
  CHECK_THROWS(read_config_file("/nonexistent/run.cfg"));
}

TEST_CASE("json output and determinism") {
  const std::vector<std::string> args{"entropy", "--operator", "tinf", "--dim", "4", "--k-max", "3",
                                      "--samples", "5000", "--format", "json"};
  const auto a = run(args), b = run(args);
  CHECK(a.code == kExitPass);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["schema"] == "entropy");
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][0].contains("e_upper"));
  CHECK(j["rows"][0]["config_hash"] == j["config_hash"]);
  auto other = args;
  other.insert(other.end(), {"--seed", "2"});
  CHECK(nlohmann::json::parse(run(other).out)["config_hash"] != j["config_hash"]);
  const fs::path out = fs::temp_directory_path() / "qbent-cli-test" / "out.json";
  auto to_file = args;
  to_file.insert(to_file.end(), {"--out", out.string()});
  CHECK(run(to_file).code == kExitPass);
  std::ifstream in(out, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == a.out);
  auto unwritable = args;
  unwritable.insert(unwritable.end(), {"--out", "/nonexistent/dir/out.json"});
  CHECK(run(unwritable).code == kExitResource);
}

TEST_CASE("csv rows echo the config hash") {
  const auto r = run({"sharpness", "--claim", "g-monotone", "--gamma", "0.5"});
  CHECK(r.code == kExitPass);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# schema=sharpness v1");
  std::getline(in, line);
  CHECK(line.substr(line.rfind(',') + 1) == "config_hash");
  std::string hash;
  while (std::getline(in, line)) {
    const std::string h = line.substr(line.rfind(',') + 1);
    if (hash.empty()) hash = h;
    CHECK(h == hash);
    CHECK(h.size() == 16);
  }
}
