#include "evoclust/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evoclust/errors.hpp"

namespace evoclust {

SpatialGrid::SpatialGrid(std::vector<Interval> bounds, std::vector<int> nodes_per_axis)
    : bounds_(std::move(bounds)), nodes_(std::move(nodes_per_axis)) {
  if (bounds_.empty() || bounds_.size() > 2)
    throw ConfigError("grid: dimension must be 1 or 2");
  if (nodes_.size() != bounds_.size())
    throw ConfigError("grid: nodes_per_axis must have one entry per axis");
  cell_measure_ = 1.0;
  size_ = 1;
  for (std::size_t a = 0; a < bounds_.size(); ++a) {
    if (!(bounds_[a].extent() > 0.0) || !std::isfinite(bounds_[a].extent()))
      throw ConfigError("grid: degenerate bounds on axis " + std::to_string(a));
    if (nodes_[a] < 2) throw ConfigError("grid: need at least 2 nodes per axis");
    spacing_.push_back(bounds_[a].extent() / nodes_[a]);
    cell_measure_ *= spacing_.back();
    size_ *= static_cast<std::size_t>(nodes_[a]);
  }
}

double SpatialGrid::volume() const {
  double v = 1.0;
  for (const auto& b : bounds_) v *= b.extent();
  return v;
}

double SpatialGrid::max_extent() const {
  double e = 0.0;
  for (const auto& b : bounds_) e = std::max(e, b.extent());
  return e;
}

double SpatialGrid::min_spacing() const {
  return *std::min_element(spacing_.begin(), spacing_.end());
}

Vec SpatialGrid::barycenter(std::size_t i) const {
  const auto idx = multi_index(i);
  Vec x(dim());
  for (int a = 0; a < dim(); ++a) x(a) = coord(a, idx[a]);
  return x;
}

bool SpatialGrid::operator==(const SpatialGrid& other) const {
  if (dim() != other.dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (nodes_[a] != other.nodes_[a] || bounds_[a].lower != other.bounds_[a].lower ||
        bounds_[a].upper != other.bounds_[a].upper)
      return false;
  }
  return true;
}

GridPtr build_spatial_grid(std::span<const Interval> bounds, std::span<const int> nodes_per_axis) {
  return std::make_shared<const SpatialGrid>(std::vector<Interval>(bounds.begin(), bounds.end()),
                                             std::vector<int>(nodes_per_axis.begin(), nodes_per_axis.end()));
}

int nodes_for_spacing(const Interval& axis_bounds, double h) {
  if (!(h > 0.0)) throw ConfigError("grid: spacing must be positive");
  if (!(axis_bounds.extent() > 0.0)) throw ConfigError("grid: degenerate bounds");
  return std::max(2, static_cast<int>(std::lround(axis_bounds.extent() / h)));
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(steps_ + past_steps_ + 1));
  for (int n = -past_steps_; n <= steps_; ++n) t.push_back(time(n));
  return t;
}

TimeGrid build_time_grid(double final_time, double dt, double tau) {
  if (!(final_time > 0.0)) throw ConfigError("time grid: final time must be positive");
  if (!(dt > 0.0)) throw ConfigError("time grid: dt must be positive");
  if (dt > final_time) throw ConfigError("time grid: dt exceeds the final time");
  if (tau < 0.0) throw ConfigError("time grid: tau must be non-negative");
  // Relative slack so that T = N dt in decimal input is not lost to rounding.
  const int steps = static_cast<int>(std::floor(final_time / dt * (1.0 + 1e-12)));
  const int past = tau > 0.0 ? static_cast<int>(std::ceil(tau / dt * (1.0 - 1e-12))) : 0;
  return TimeGrid(final_time, dt, steps, past);
}

}  // namespace evoclust
