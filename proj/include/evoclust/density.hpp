#pragma once

#include <numeric>
#include <vector>

#include "evoclust/grid.hpp"

namespace evoclust {

/// Nonnegative density sampled at the barycenters of a grid at one time instant.
struct DensityField {
  GridPtr grid;
  std::vector<double> values;
  double time = 0.0;

  DensityField() = default;
  DensityField(GridPtr g, double t) : grid(std::move(g)), values(grid->size(), 0.0), time(t) {}
  DensityField(GridPtr g, std::vector<double> v, double t)
      : grid(std::move(g)), values(std::move(v)), time(t) {}

  /// Quadrature mass h * sum_i m_i.
  double mass() const {
    return grid->cell_measure() * std::accumulate(values.begin(), values.end(), 0.0);
  }
  /// Rescales to unit quadrature mass; a field with zero mass is left untouched.
  void normalize() {
    const double m = mass();
    if (m > 0.0)
      for (double& v : values) v /= m;
  }
};

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where);

}  // namespace evoclust
