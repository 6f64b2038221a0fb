#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "evoclust/density.hpp"

namespace evoclust {

enum class DataKind { test1, test2, gridded };

/// Three moving indicator blocks on the line.
struct Test1Params {
  std::array<double, 3> a{0.12, 0.37, 0.6};
  std::array<double, 3> b{0.18, 0.42, 0.9};
  std::array<double, 3> c{3.0, 7.0, 1.5};
  std::array<double, 3> v{0.1, 0.1, -0.1};
  double normalization = 0.98;
};

/// Three moving discs in the plane; radii must satisfy sum_k c_k r_k^2 = 0.0825.
struct Test2Params {
  std::array<double, 3> c{1.0, 2.0, 0.5};
  std::array<double, 3> radii{};
  static constexpr double kNormalization = 0.0825;

  static double default_radius();
  static Test2Params with_default_radii();
  std::array<Vec, 3> centers(double t) const;
};

/// Time series of gridded frames (linear interpolation in time, constant extension).
struct GriddedSequence {
  GridPtr grid;
  std::vector<double> times;
  std::vector<std::vector<double>> frames;
};

class DataDensity {
 public:
  static DataDensity test1(Test1Params p = {});
  static DataDensity test2(Test2Params p = Test2Params::with_default_radii());
  static DataDensity gridded(GriddedSequence seq);

  DataKind kind() const { return kind_; }
  int dim() const;
  const Test1Params& test1_params() const { return test1_; }
  const Test2Params& test2_params() const { return test2_; }
  const GriddedSequence& sequence() const { return seq_; }

  /// Pointwise value; analytic kinds only. Negative times use the t = 0 profile.
  double operator()(const Vec& x, double t) const;

  /// Per-component analytic centroids (interval midpoints or disc centers).
  std::vector<Vec> exact_centroids(double t) const;

 private:
  DataKind kind_ = DataKind::test1;
  Test1Params test1_;
  Test2Params test2_;
  GriddedSequence seq_;
};

double eval_test1(double x, double t, const Test1Params& p = {});
double eval_test2(const Vec& x, double t, const Test2Params& p = Test2Params::with_default_radii());

/// Samples f(., t) at the barycenters. With `renormalize`, the field is rescaled to unit quadrature mass.
DensityField sample_to_grid(const DataDensity& f, const GridPtr& grid, double t, bool renormalize = true);

/// Reads `t,i0[,i1],value` rows plus a JSON sidecar {"lower":[..],"upper":[..],"nodes":[..]}.
GriddedSequence load_gridded_sequence(const std::filesystem::path& csv, const std::filesystem::path& sidecar);

}  // namespace evoclust
