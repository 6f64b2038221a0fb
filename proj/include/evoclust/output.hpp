#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "evoclust/driver.hpp"
#include "evoclust/metrics.hpp"

namespace evoclust {

/// Shortest representation that parses back to the same double.
std::string format_double(double x);

/// RFC 4180 writer with LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double x);
  CsvWriter& cell(int x);
  CsvWriter& cell(std::uint64_t x);
  void row(const std::vector<std::string>& cells);
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  std::filesystem::path path_;
  bool row_started_ = false;
};

struct Snapshot {
  int index = 0;
  double time = 0.0;
  std::vector<DensityField> components;
  std::vector<double> weights;
  DensityField data;
};

/// File name for a snapshot: density_t<time with six decimals>.csv
std::string snapshot_name(double time);

void write_summary(const std::filesystem::path& path, const Trajectory& tr, std::uint64_t seed);
void write_alphas(const std::filesystem::path& path, const Trajectory& tr, std::uint64_t seed);
/// Per-node metrics; tv columns hold the running totals so the last row carries the full values.
void write_metrics(const std::filesystem::path& path, const Trajectory& tr, const MetricSeries& m,
                   std::uint64_t seed);
void write_residuals(const std::filesystem::path& path, const Trajectory& tr, std::uint64_t seed);
void write_snapshot(const std::filesystem::path& path, const Snapshot& s, Model model, std::uint64_t seed);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace evoclust
