#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "evoclust/driver.hpp"

namespace evoclust {

inline constexpr int kSchemaVersion = 1;

/// A run configuration plus the output options that travel with it.
struct RunFile {
  RunConfig config;
  std::vector<double> snapshots;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Constant-coefficient Fokker-Planck scenario checked against the Gaussian moment equations.
struct OracleScenario {
  std::vector<Interval> bounds{{0.0, 1.0}};
  double epsilon = 0.1;
  Mat rate;
  Vec attractor;
  Vec mean0;
  Mat cov0;
  double final_time = 1.0;
  double spacing = 5e-3;
  double dt = 5e-4;
  int refinements = 3;
  FpOptions fp{1.0, 0.0, 4096, true};
};

/// Parses a run configuration. Unknown keys and bad values raise ConfigError with the field path.
/// Relative dataset paths resolve against `base_dir`.
RunFile parse_run_file(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunFile load_run_file(const std::filesystem::path& path);

/// Full echo of every setting; parse_run_file(to_json(f)) reproduces f.
nlohmann::json to_json(const RunFile& f);

OracleScenario parse_oracle_scenario(const nlohmann::json& j);
OracleScenario load_oracle_scenario(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace evoclust
