#pragma once

#include <random>
#include <vector>

#include "evoclust/grid.hpp"

namespace evoclust::test {

inline GridPtr line(double lo, double hi, int n) {
  std::vector<Interval> b{{lo, hi}};
  std::vector<int> nodes{n};
  return build_spatial_grid(b, nodes);
}

inline GridPtr square(double lo, double hi, int n) {
  std::vector<Interval> b{{lo, hi}, {lo, hi}};
  std::vector<int> nodes{n, n};
  return build_spatial_grid(b, nodes);
}

inline std::vector<double> random_masses(std::mt19937_64& rng, std::size_t n, double zero_share = 0.2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng) < zero_share ? 0.0 : u(rng);
  return v;
}

}  // namespace evoclust::test
