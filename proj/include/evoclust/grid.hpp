#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "evoclust/linalg.hpp"

namespace evoclust {

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
  double extent() const { return upper - lower; }
};

/// Uniform Cartesian cell-centered grid in one or two dimensions.
/// Flat node index runs fastest along axis 0.
class SpatialGrid {
 public:
  SpatialGrid(std::vector<Interval> bounds, std::vector<int> nodes_per_axis);

  int dim() const { return static_cast<int>(bounds_.size()); }
  std::size_t size() const { return size_; }
  int nodes(int axis) const { return nodes_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  const Interval& bounds(int axis) const { return bounds_[axis]; }
  double cell_measure() const { return cell_measure_; }
  double volume() const;
  double max_extent() const;
  double min_spacing() const;

  double coord(int axis, int index) const {
    return bounds_[axis].lower + (index + 0.5) * spacing_[axis];
  }
  std::array<int, 2> multi_index(std::size_t i) const {
    return {static_cast<int>(i % nodes_[0]), dim() == 2 ? static_cast<int>(i / nodes_[0]) : 0};
  }
  std::size_t flat_index(int i0, int i1 = 0) const {
    return static_cast<std::size_t>(i0) + static_cast<std::size_t>(i1) * nodes_[0];
  }
  Vec barycenter(std::size_t i) const;
  /// Coordinate of node i along `axis`, without building a vector.
  double node_coord(std::size_t i, int axis) const {
    return coord(axis, multi_index(i)[axis]);
  }

  bool operator==(const SpatialGrid& other) const;

 private:
  std::vector<Interval> bounds_;
  std::vector<int> nodes_;
  std::vector<double> spacing_;
  double cell_measure_ = 0.0;
  std::size_t size_ = 0;
};

using GridPtr = std::shared_ptr<const SpatialGrid>;

GridPtr build_spatial_grid(std::span<const Interval> bounds, std::span<const int> nodes_per_axis);

/// Node count giving spacing closest to `h` on `axis_bounds`.
int nodes_for_spacing(const Interval& axis_bounds, double h);

/// Uniform time nodes t_n = n dt for n = -past_steps .. steps.
class TimeGrid {
 public:
  TimeGrid(double final_time, double dt, int steps, int past_steps)
      : final_time_(final_time), dt_(dt), steps_(steps), past_steps_(past_steps) {}

  double dt() const { return dt_; }
  double final_time() const { return final_time_; }
  int steps() const { return steps_; }
  int past_steps() const { return past_steps_; }
  double time(int n) const { return n * dt_; }
  std::vector<double> nodes() const;

 private:
  double final_time_;
  double dt_;
  int steps_;
  int past_steps_;
};

TimeGrid build_time_grid(double final_time, double dt, double tau);

}  // namespace evoclust
