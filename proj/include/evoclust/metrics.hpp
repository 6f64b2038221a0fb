#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evoclust/datasets.hpp"
#include "evoclust/driver.hpp"
#include "evoclust/estep.hpp"

namespace evoclust {

/// Sparse optimal plan: mass[e] moves from source node[e] to target node[e].
struct TransportPlan {
  std::vector<std::size_t> source;
  std::vector<std::size_t> target;
  std::vector<double> mass;
  double cost = 0.0;
};

/// Balanced transportation problem  min sum c_ij pi_ij  s.t. row sums = supply, column sums = demand,
/// pi >= 0, solved exactly by the transportation simplex (least-cost start, u-v potentials).
TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              const std::vector<std::vector<double>>& cost);

/// 1D Wasserstein-1 via the CDF identity h * sum_i |F_i - M_i|. Both fields are renormalized to
/// unit mass first. Throws ConfigError when d != 1.
double w1_1d(const DensityField& f, const DensityField& m);

/// Exact W1 by linear programming with Euclidean ground cost; at most 200 nodes.
TransportPlan w1_lp_oracle(const DensityField& f, const DensityField& m);

/// Aggregates blocks of cells so the result has at most `max_nodes` nodes.
DensityField coarsen(const DensityField& m, std::size_t max_nodes);

/// W1 in any dimension: exact CDF formula in 1D, LP on a coarsened grid (approximate) in 2D.
double w1(const DensityField& f, const DensityField& m, bool* approximate = nullptr);

/// min over matchings of sum_k ||est_k - truth_k||_1. With unequal counts the smaller list is
/// matched injectively into the larger.
double centroid_error(std::span<const Vec> est, std::span<const Vec> truth);

/// sum_n ||s_{n+1} - s_n||_1
double total_variation(std::span<const std::vector<double>> series);
double total_variation(std::span<const std::vector<Vec>> series);

/// argmax_k gamma_k(x_i) with the lowest index winning ties; nodes where f vanishes get -1.
std::vector<int> hard_clusters(const ResponsibilityField& gamma, const DensityField& f);

/// Shift l in [-max_lag, max_lag] minimizing the mean squared difference between lagged[n] and
/// reference[n - l] over the overlap (ties go to the smaller |l|). Positive l means `lagged` trails.
/// Each series entry is a stacked vector of centroid coordinates.
int alignment_lag(std::span<const std::vector<double>> lagged, std::span<const std::vector<double>> reference,
                  int max_lag);

/// Per-node evaluation of a trajectory.
struct MetricSeries {
  std::vector<double> time;
  std::vector<double> centroid_error;
  std::vector<double> w1;
  std::vector<double> mass_drift;
  double tv_alpha = 0.0;
  double tv_centroids = 0.0;
  bool w1_approximate = false;
};

/// Collects W1(data, mixture) frame by frame; hand `observer()` to the driver.
class MetricCollector {
 public:
  FrameObserver observer();
  MetricSeries finish(const Trajectory& trajectory, const DataDensity& data) const;

 private:
  std::vector<double> w1_;
  bool approximate_ = false;
};

/// Centroids of a trajectory flattened per node (component-major, all coordinates).
std::vector<std::vector<double>> stacked_centroids(const Trajectory& trajectory);

}  // namespace evoclust
