#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "evoclust/cli.hpp"
#include "evoclust/config.hpp"
#include "evoclust/errors.hpp"
#include "evoclust/output.hpp"

using namespace evoclust;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json small_run(const std::string& model) {
  return json{{"schema_version", 1},
              {"model", model},
              {"components", 3},
              {"final_time", 0.05},
              {"dt", 0.001},
              {"epsilon", 1.0},
              {"tau", 0.02},
              {"seed", 3},
              {"grid", {{"bounds", {{0.0, 1.0}}}, {"spacing", 0.02}}},
              {"dataset", {{"kind", "test1"}}}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const json& j) const {
    std::ofstream(path / name) << j.dump(2);
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const json& j) {
  try {
    parse_run_file(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("strict configuration parsing") {
  CHECK(config_error(small_run("asym_averaged")) == "");

  auto j = small_run("instantaneous");
  j["grid"]["spacnig"] = 0.01;
  CHECK(config_error(j).find("grid.spacnig") != std::string::npos);

  j = small_run("instantaneous");
  j["toleranse"] = 1;
  CHECK(config_error(j).find("toleranse") != std::string::npos);

  j = small_run("asym_averaged");
  j["tau"] = 0.0;
  CHECK(config_error(j).find("tau") != std::string::npos);

  j = small_run("instantaneous");
  j["dt"] = "fast";
  CHECK(config_error(j).find("dt") != std::string::npos);

  j = small_run("instantaneous");
  j["schema_version"] = 7;
  CHECK(config_error(j).find("schema_version") != std::string::npos);

  j = small_run("instantaneous");
  j.erase("model");
  CHECK_FALSE(config_error(j).empty());

  j = small_run("sym_averaged");
  j["fixed_point"] = {{"tol", 1e-5}, {"max_iterations", 10}, {"dampnig", 0.5}};
  CHECK(config_error(j).find("fixed_point.dampnig") != std::string::npos);
}

TEST_CASE("configuration echo round-trips") {
  auto j = small_run("sym_averaged");
  j["fixed_point"] = {{"tol", 1e-5}, {"max_iterations", 7}, {"damping", 0.5}};
  j["solver"] = {{"cfl_max", 0.8}, {"derivative", "centered"}};
  j["snapshots"] = {0.0, 0.01};
  j["metadata"] = {{"note", "x"}};
  const RunFile f = parse_run_file(j);
  CHECK(f.config.fixed_point.max_iterations == 7);
  CHECK(f.config.solver.fp.cfl_max == 0.8);
  CHECK(f.config.solver.derivative == DerivativeScheme::centered);
  CHECK(f.snapshots.size() == 2);
  const json echo = to_json(f);
  CHECK(to_json(parse_run_file(echo)) == echo);
  CHECK(echo["metadata"]["note"] == "x");
}

TEST_CASE("oracle scenario parsing") {
  const json scenario = {{"bounds", {{0.0, 1.0}}}, {"epsilon", 0.1}, {"rate", {{2.0}}}, {"attractor", {0.5}},
                         {"mean0", {0.4}}, {"cov0", {{0.002}}}, {"final_time", 0.2}, {"spacing", 0.01},
                         {"dt", 0.001}, {"refinements", 2}};
  const json j = {{"schema_version", 1}, {"oracle", scenario}};
  const auto s = parse_oracle_scenario(j);
  CHECK(s.rate(0, 0) == 2.0);
  CHECK(s.refinements == 2);
  json bad = j;
  bad["oracle"]["rate"] = {{2.0, 0.0}};
  CHECK_THROWS_AS(parse_oracle_scenario(bad), ConfigError);
}

TEST_CASE("csv writer quoting and number format") {
  TempDir dir("evoclust_csv_test");
  {
    CsvWriter w(dir.path / "t.csv");
    w.row({"plain", "with,comma", "with \"quote\"", "line\nbreak"});
    w.cell(0.1).cell(3).cell(std::uint64_t{18446744073709551615ull}).cell("x");
    w.end_row();
  }
  CHECK(slurp(dir.path / "t.csv") ==
        "plain,\"with,comma\",\"with \"\"quote\"\"\",\"line\nbreak\"\n0.1,3,18446744073709551615,x\n");
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 4.0})
    CHECK(std::stod(format_double(x)) == x);
  CHECK(snapshot_name(0.25) == "density_t0.250000.csv");
}

TEST_CASE("run writes a replayable bundle") {
  TempDir dir("evoclust_run_test");
  auto j = small_run("asym_averaged");
  const auto cfg = dir.write("run.json", j);
  RunRequest req;
  req.config = cfg;
  req.out = dir.path / "out";
  req.snapshots = std::vector<double>{0.0, 0.02};
  std::ostringstream log;
  CHECK(cmd_run(req, log) == kExitOk);
  for (const char* name : {"summary.csv", "metrics.csv", "alphas.csv", "run.json", "report.json",
                           "density_t0.000000.csv", "density_t0.020000.csv"})
    CHECK(fs::exists(req.out / name));
  const auto summary = slurp(req.out / "summary.csv");
  CHECK(summary.rfind("seed,model,step,time,component,alpha,mean_x,var_x\n", 0) == 0);

  RunRequest replay;
  replay.config = req.out / "run.json";
  replay.out = dir.path / "again";
  CHECK(cmd_run(replay, log) == kExitOk);
  for (const char* name : {"summary.csv", "metrics.csv", "alphas.csv", "density_t0.020000.csv"})
    CHECK(slurp(req.out / name) == slurp(replay.out / name));

  req.snapshots = std::vector<double>{1.0};
  CHECK_THROWS_AS(cmd_run(req, log), ConfigError);
}

TEST_CASE("compare needs compatible inputs") {
  TempDir dir("evoclust_compare_test");
  const auto a = dir.write("a.json", small_run("instantaneous"));
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_compare({a}, dir.path / "out", std::nullopt, log), ConfigError);

  auto other = small_run("asym_averaged");
  other["grid"]["spacing"] = 0.05;
  const auto b = dir.write("b.json", other);
  CHECK_THROWS_AS(cmd_compare({a, b}, dir.path / "out", std::nullopt, log), ConfigError);
  other = small_run("asym_averaged");
  other["dt"] = 0.002;
  const auto c = dir.write("c.json", other);
  CHECK_THROWS_AS(cmd_compare({a, c}, dir.path / "out", std::nullopt, log), ConfigError);
}

TEST_CASE("comparing a run with itself shows no differences") {
  TempDir dir("evoclust_self_test");
  const auto a = dir.write("a.json", small_run("asym_averaged"));
  std::ostringstream log;
  CHECK(cmd_compare({a, a}, dir.path / "out", std::nullopt, log) == kExitOk);
  std::ifstream in(dir.path / "out" / "compare_summary.csv");
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  CHECK(header == "run,seed,model,tv_alpha,tv_centroids,mean_w1,max_centroid_gap_to_run0,lag_steps_vs_run0,converged");
  CHECK(row0.substr(row0.find(',')) == row1.substr(row1.find(',')));
  CHECK(row1.find(",0,0,true") != std::string::npos);
}

TEST_CASE("failures map to exit codes") {
  auto code = [](auto thrower) {
    std::ostringstream err;
    try {
      thrower();
    } catch (...) {
      return report_failure(err);
    }
    return -1;
  };
  CHECK(code([] { throw ConfigError("x"); }) == kExitConfig);
  CHECK(code([] { throw NumericalError("x"); }) == kExitNumerical);
  CHECK(code([] { throw CflError("x", 2.0); }) == kExitNumerical);
  CHECK(code([] { throw std::runtime_error("x"); }) == 1);
}
