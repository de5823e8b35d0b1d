#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "scmm/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = SCMM_CONFIG_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "scmm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = scmm::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("scmm-cli-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  std::string str() const { return path.string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const std::string& path) { return json::parse(slurp(path)); }

void spit(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

// Data rows of a '#'-commented CSV, header dropped.
std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
  std::istringstream in(slurp(path));
  std::vector<std::vector<std::string>> rows;
  bool header = true;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::string strip_generated(const std::string& text) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);)
    if (line.rfind("# generated:", 0) != 0) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("validate") {
  TempDir d("validate");
  CHECK(run({"validate", kConfigs + "/gaussian.json", "--out", d.str()}).code == 0);
  CHECK(read_json(d / "validate.json")["ok"] == true);
  CHECK(read_json(d / "validate_manifest.json")["files"] == json::array({"validate.json"}));

  spit(d / "neg.json", R"({"reg": [0, 1], "singularities": [{"b": [0, 0], "alpha": -1.0}], "support": [["-inf", "inf"]], "n": 5})");
  const auto neg = run({"validate", d / "neg.json", "--out", d.str()});
  CHECK(neg.code == 2);
  CHECK(neg.err.find("alpha") != std::string::npos);
  CHECK(read_json(d / "validate_manifest.json")["exit_code"] == 2);

  spit(d / "flat.json", R"({"reg": [0, -1], "support": [["-inf", "inf"]], "n": 5})");
  CHECK(run({"validate", d / "flat.json", "--out", d.str()}).code == 2);
  CHECK(read_json(d / "validate.json")["ok"] == false);

  spit(d / "bad.json", R"({"reg": [0, 1], "support": [["-inf", "inf"]], "n": 5, "colour": 3})");
  const auto bad = run({"validate", d / "bad.json", "--out", d.str()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("colour") != std::string::npos);

  CHECK(run({"validate", d / "missing.json", "--out", d.str()}).code == 2);
  for (const auto* cfg : {"quartic_critical.json", "quartic_two_cut.json", "laguerre_hard_edge.json"})
    CHECK(run({"validate", kConfigs + "/" + cfg, "--out", d.str()}).code == 0);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"sample", kConfigs + "/gaussian.json"}).code == 1);
  CHECK(run({"equilibrium"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("equilibrium") {
  TempDir d("equilibrium");
  REQUIRE(run({"equilibrium", kConfigs + "/gaussian.json", "--grid", "-1:1:5", "--out", d.str()}).code == 0);
  const auto rows = csv_rows(d / "equilibrium_density.csv");
  REQUIRE(rows.size() == 5);
  CHECK(std::stod(rows[2][0]) == 0.0);
  CHECK(std::stod(rows[2][1]) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
  CHECK(rows[2][2] == "1");
  const json j = read_json(d / "equilibrium.json");
  CHECK(j["variational"]["ok"] == true);

  REQUIRE(run({"equilibrium", kConfigs + "/quartic_critical.json", "--out", d.str()}).code == 0);
  const json q = read_json(d / "equilibrium.json");
  CHECK(csv_rows(d / "equilibrium_variational.csv").size() > 0);
  CHECK(csv_rows(d / "equilibrium_density.csv").size() == 200);
  CHECK(q.dump().find("one_cut") != std::string::npos);

  CHECK(run({"equilibrium", kConfigs + "/quartic_two_cut.json", "--out", d.str()}).code == 3);
  CHECK(run({"equilibrium", kConfigs + "/quartic_two_cut.json", "--structure", "symmetric_two_cut", "--out", d.str()})
            .code == 0);
  CHECK(run({"equilibrium", kConfigs + "/gaussian.json", "--structure", "three_cut", "--out", d.str()}).code == 2);
  CHECK(run({"equilibrium", kConfigs + "/gaussian.json", "--grid", "1:0:3", "--out", d.str()}).code == 2);
}

TEST_CASE("classify") {
  TempDir d("classify");
  REQUIRE(run({"classify", "--scenario", "gue-edge", "--out", d.str()}).code == 0);
  const json j = read_json(d / "classify.json");
  REQUIRE(j["critical_points"].size() == 2);
  for (const auto& cp : j["critical_points"]) {
    CHECK(cp["kind"] == "edge");
    CHECK(cp.contains("model_data"));
  }

  REQUIRE(run({"classify", kConfigs + "/laguerre_hard_edge.json", "--structure", "hard_edge_one_cut", "--out", d.str()})
              .code == 0);
  CHECK(run({"classify", "--out", d.str()}).code == 2);
  CHECK(run({"classify", "--scenario", "nope", "--out", d.str()}).code == 2);
}

TEST_CASE("kernel") {
  TempDir d("kernel");
  REQUIRE(run({"kernel", kConfigs + "/gaussian.json", "--n", "20", "--grid", "-1.5:1.5:7", "--out", d.str()}).code == 0);
  const json j = read_json(d / "kernel.json");
  CHECK(j["n"] == 20);
  CHECK(j["max_asymmetry"].get<double>() == 0.0);
  CHECK(j["trace_relative_error"].get<double>() < 1e-8);
  const auto grid = csv_rows(d / "kernel_grid.csv");
  CHECK(grid.size() == 49);
  double trace = 0.0;
  for (const auto& r : csv_rows(d / "kernel_trace.csv")) trace += std::stod(r[3]);
  CHECK(trace == doctest::Approx(20.0).epsilon(1e-8));
  CHECK(csv_rows(d / "kernel_recurrence.csv").size() >= 20);

  REQUIRE(run({"kernel", kConfigs + "/laguerre_hard_edge.json", "--n", "10", "--grid", "-2:1:4", "--out", d.str()})
              .code == 0);
  int flagged = 0;
  for (const auto& r : csv_rows(d / "kernel_grid.csv")) {
    const bool outside = std::stod(r[2]) > 0.0 || std::stod(r[3]) > 0.0;
    CHECK(r[5] == (outside ? "0" : "1"));
    flagged += outside;
  }
  CHECK(flagged == 7);
  CHECK(read_json(d / "kernel.json")["out_of_domain_points"] == 7);

  REQUIRE(run({"kernel", kConfigs + "/gaussian.json", "--n", "30", "--at", "0", "--out", d.str()}).code == 0);
  CHECK(read_json(d / "kernel.json")["map"]["mode"] == "scaled");
  CHECK(run({"kernel", kConfigs + "/gaussian.json", "--at", "left", "--out", d.str()}).code == 2);

  const std::string cache = d / "cache";
  REQUIRE(run({"kernel", kConfigs + "/gaussian.json", "--cache", cache, "--out", d.str()}).code == 0);
  CHECK(read_json(d / "kernel.json")["recurrence_cached"] == false);
  const auto first = csv_rows(d / "kernel_grid.csv");
  REQUIRE(run({"kernel", kConfigs + "/gaussian.json", "--cache", cache, "--out", d.str()}).code == 0);
  CHECK(read_json(d / "kernel.json")["recurrence_cached"] == true);
  CHECK(csv_rows(d / "kernel_grid.csv") == first);
}

TEST_CASE("converge") {
  TempDir d("converge");
  REQUIRE(run({"converge", "gue-bulk", "--n-list", "20,40", "--grid", "-1:1:5", "--out", d.str()}).code == 0);
  const json j = read_json(d / "converge.json");
  CHECK(j["decreasing"] == true);
  CHECK(j["reference"] == "sine");
  CHECK(j["rows"][1]["sup_error"].get<double>() < j["rows"][0]["sup_error"].get<double>());
  CHECK(run({"converge", "gue-nowhere", "--out", d.str()}).code == 2);
  CHECK(run({"converge", "gue-bulk", "--n-list", "20,x", "--out", d.str()}).code == 2);
}

TEST_CASE("sample") {
  TempDir d("sample");
  const std::vector<std::string> args{"sample", kConfigs + "/gaussian.json", "--steps", "400", "--seed", "9",
                                      "--chains", "2", "--threads", "2", "--out"};
  auto a = args;
  a.push_back(d / "a");
  auto b = args;
  b.push_back(d / "b");
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  for (const auto* f : {"sample_chain0.csv", "sample_chain1.csv", "sample_histogram.csv"})
    CHECK(strip_generated(slurp(d / (std::string("a/") + f))) == strip_generated(slurp(d / (std::string("b/") + f))));
  CHECK(csv_rows(d / "a/sample_chain0.csv") != csv_rows(d / "a/sample_chain1.csv"));
  CHECK(csv_rows(d / "a/sample_chain0.csv").size() == 360);

  const json j = read_json(d / "a/sample.json");
  CHECK(j["chains"].size() == 2);
  CHECK(j["comparison"]["l1_dev"].get<double>() < 0.2);
  const json m = read_json(d / "a/sample_manifest.json");
  CHECK(m["files"].size() == 4);
  CHECK(m["overrides"]["--seed"] == "9");

  CHECK(run({"sample", kConfigs + "/gaussian.json", "--steps", "0", "--out", d / "c"}).code == 2);
  CHECK(run({"sample", kConfigs + "/gaussian.json", "--steps", "10", "--burn-in", "10", "--out", d / "c"}).code == 2);
  REQUIRE(run({"sample", kConfigs + "/gaussian.json", "--steps", "50", "--no-dump", "--out", d / "c"}).code == 0);
  CHECK_FALSE(fs::exists(d / "c/sample_chain0.csv"));
}

TEST_CASE("output directory from the environment") {
  TempDir d("env");
  ::setenv(scmm::kOutputDirEnv, d.str().c_str(), 1);
  const int code = run({"validate", kConfigs + "/gaussian.json"}).code;
  ::unsetenv(scmm::kOutputDirEnv);
  CHECK(code == 0);
  CHECK(fs::exists(d / "validate.json"));
  CHECK(read_json(d / "validate_manifest.json")["output_dir"] == d.str());
}
