#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "evoclust/config.hpp"
#include "evoclust/metrics.hpp"
#include "evoclust/output.hpp"

namespace evoclust {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitNotConverged = 4;

struct RunRequest {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::optional<std::vector<double>> snapshots;
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  RunFile file;
  Trajectory trajectory;
  MetricSeries metrics;
  std::vector<Snapshot> snapshots;
};

/// Runs the driver with metric collection and snapshot capture.
RunResult execute(const RunFile& file);

/// Writes every output file of a finished run into `dir`; returns the file names.
std::vector<std::string> write_bundle(const RunResult& result, const std::filesystem::path& dir);

int cmd_run(const RunRequest& request, std::ostream& log);
int cmd_oracle_check(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out,
                     std::ostream& log);
int cmd_compare(const std::vector<std::filesystem::path>& configs, const std::filesystem::path& out,
                std::optional<std::uint64_t> seed, std::ostream& log);

/// Maps an exception from the commands above to an exit code and prints it.
int report_failure(std::ostream& err);

}  // namespace evoclust
