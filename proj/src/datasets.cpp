#include "evoclust/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "evoclust/errors.hpp"

namespace evoclust {

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where) {
  if (!(a == b)) throw ConfigError(std::string(where) + ": fields live on different grids");
}

double Test2Params::default_radius() { return std::sqrt(kNormalization / 3.5); }

Test2Params Test2Params::with_default_radii() {
  Test2Params p;
  p.radii.fill(default_radius());
  return p;
}

std::array<Vec, 3> Test2Params::centers(double t) const {
  std::array<Vec, 3> y{Vec(2), Vec(2), Vec(2)};
  y[0] << 0.5, 0.5 - 0.25 * t;
  y[1] << 0.75 * t, 1.0 - 0.3 * t;
  y[2] << 0.75 * t, 0.75 * t;
  return y;
}

double eval_test1(double x, double t, const Test1Params& p) {
  t = std::max(t, 0.0);
  double sum = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double lo = p.a[k] + p.v[k] * t;
    const double hi = p.b[k] + p.v[k] * t;
    if (x >= lo && x <= hi) sum += p.c[k];
  }
  return sum / p.normalization;
}

double eval_test2(const Vec& x, double t, const Test2Params& p) {
  t = std::max(t, 0.0);
  const auto y = p.centers(t);
  double sum = 0.0;
  for (std::size_t k = 0; k < 3; ++k)
    if ((x - y[k]).norm() <= p.radii[k]) sum += p.c[k];
  return sum / (Test2Params::kNormalization * std::numbers::pi);
}

DataDensity DataDensity::test1(Test1Params p) {
  DataDensity d;
  d.kind_ = DataKind::test1;
  d.test1_ = p;
  return d;
}

DataDensity DataDensity::test2(Test2Params p) {
  double s = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(p.radii[k] > 0.0)) throw ConfigError("dataset.radii: radii must be positive");
    s += p.c[k] * p.radii[k] * p.radii[k];
  }
  if (std::abs(s - Test2Params::kNormalization) > 1e-12)
    throw ConfigError("dataset.radii: sum_k c_k r_k^2 must equal 0.0825 (unit mass)");
  DataDensity d;
  d.kind_ = DataKind::test2;
  d.test2_ = p;
  return d;
}

DataDensity DataDensity::gridded(GriddedSequence seq) {
  if (!seq.grid || seq.frames.empty() || seq.frames.size() != seq.times.size())
    throw ConfigError("dataset: gridded sequence is empty or inconsistent");
  if (!std::is_sorted(seq.times.begin(), seq.times.end()))
    throw ConfigError("dataset: gridded frame times must be increasing");
  DataDensity d;
  d.kind_ = DataKind::gridded;
  d.seq_ = std::move(seq);
  return d;
}

int DataDensity::dim() const {
  switch (kind_) {
    case DataKind::test1: return 1;
    case DataKind::test2: return 2;
    case DataKind::gridded: return seq_.grid->dim();
  }
  return 1;
}

double DataDensity::operator()(const Vec& x, double t) const {
  switch (kind_) {
    case DataKind::test1: return eval_test1(x(0), t, test1_);
    case DataKind::test2: return eval_test2(x, t, test2_);
    case DataKind::gridded: break;
  }
  throw ConfigError("dataset: pointwise evaluation is not defined for gridded sequences");
}

std::vector<Vec> DataDensity::exact_centroids(double t) const {
  std::vector<Vec> out;
  if (kind_ == DataKind::test1) {
    for (std::size_t k = 0; k < 3; ++k) {
      Vec c(1);
      c(0) = 0.5 * (test1_.a[k] + test1_.b[k]) + test1_.v[k] * std::max(t, 0.0);
      out.push_back(c);
    }
    return out;
  }
  if (kind_ == DataKind::test2) {
    const auto y = test2_.centers(std::max(t, 0.0));
    return {y.begin(), y.end()};
  }
  throw ConfigError("dataset: exact centroids are unavailable for gridded sequences");
}

DensityField sample_to_grid(const DataDensity& f, const GridPtr& grid, double t, bool renormalize) {
  DensityField out(grid, t);
  if (f.kind() == DataKind::gridded) {
    const auto& seq = f.sequence();
    require_same_grid(*seq.grid, *grid, "sample_to_grid");
    const auto& ts = seq.times;
    if (t <= ts.front()) {
      out.values = seq.frames.front();
    } else if (t >= ts.back()) {
      out.values = seq.frames.back();
    } else {
      const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
      for (std::size_t i = 0; i < grid->size(); ++i)
        out.values[i] = (1.0 - w) * seq.frames[lo][i] + w * seq.frames[hi][i];
    }
  } else {
    if (f.dim() != grid->dim()) throw ConfigError("sample_to_grid: dataset/grid dimension mismatch");
    for (std::size_t i = 0; i < grid->size(); ++i) out.values[i] = f(grid->barycenter(i), t);
  }
  if (renormalize) out.normalize();
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  return cells;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + s + "'");
  }
}

}  // namespace

GriddedSequence load_gridded_sequence(const std::filesystem::path& csv, const std::filesystem::path& sidecar) {
  std::ifstream side(sidecar);
  if (!side) throw ConfigError("dataset.sidecar: cannot open " + sidecar.string());
  nlohmann::json meta;
  try {
    side >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("dataset.sidecar: ") + e.what());
  }
  std::vector<Interval> bounds;
  std::vector<int> nodes;
  try {
    const auto lower = meta.at("lower").get<std::vector<double>>();
    const auto upper = meta.at("upper").get<std::vector<double>>();
    nodes = meta.at("nodes").get<std::vector<int>>();
    if (lower.size() != upper.size() || lower.size() != nodes.size())
      throw ConfigError("dataset.sidecar: lower/upper/nodes lengths differ");
    for (std::size_t a = 0; a < lower.size(); ++a) bounds.push_back({lower[a], upper[a]});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("dataset.sidecar: ") + e.what());
  }
  GriddedSequence seq;
  seq.grid = build_spatial_grid(bounds, nodes);
  const int d = seq.grid->dim();

  std::ifstream in(csv);
  if (!in) throw ConfigError("dataset.csv: cannot open " + csv.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset.csv: empty file");
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected =
      d == 1 ? std::vector<std::string>{"t", "i0", "value"} : std::vector<std::string>{"t", "i0", "i1", "value"};
  if (header != expected) throw ConfigError("dataset.csv: unexpected header '" + line + "'");

  std::map<double, std::vector<double>> frames;
  std::map<double, std::size_t> filled;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    const std::string where = "dataset.csv row " + std::to_string(row);
    if (cells.size() != expected.size()) throw ConfigError(where + ": wrong column count");
    const double t = parse_double(cells[0], where);
    const int i0 = static_cast<int>(parse_double(cells[1], where));
    const int i1 = d == 2 ? static_cast<int>(parse_double(cells[2], where)) : 0;
    const double v = parse_double(cells.back(), where);
    if (i0 < 0 || i0 >= seq.grid->nodes(0) || (d == 2 && (i1 < 0 || i1 >= seq.grid->nodes(1))))
      throw ConfigError(where + ": node index out of range");
    if (v < 0.0 || !std::isfinite(v)) throw ConfigError(where + ": density must be finite and nonnegative");
    auto [it, inserted] = frames.try_emplace(t, seq.grid->size(), 0.0);
    it->second[seq.grid->flat_index(i0, i1)] = v;
    ++filled[t];
  }
  if (frames.empty()) throw ConfigError("dataset.csv: no frames");
  for (auto& [t, values] : frames) {
    if (filled[t] != seq.grid->size())
      throw ConfigError("dataset.csv: frame t=" + std::to_string(t) + " does not cover every node");
    DensityField frame(seq.grid, std::move(values), t);
    if (!(frame.mass() > 0.0)) throw ConfigError("dataset.csv: frame with zero mass");
    frame.normalize();
    seq.times.push_back(t);
    seq.frames.push_back(std::move(frame.values));
  }
  return seq;
}

}  // namespace evoclust
