#pragma once

#include <vector>

#include "evoclust/config.hpp"

namespace evoclust {

/// Grid solution against the Gaussian moment equations at the final time of one resolution.
struct OracleRow {
  double spacing = 0.0;
  double dt = 0.0;
  int steps = 0;
  Vec mean_fp;
  Vec mean_ode;
  Mat cov_fp;
  Mat cov_ode;
  double mass = 0.0;
  /// |mean_fp - mean_ode| / |mean_ode|
  double mean_error = 0.0;
  /// ||cov_fp - cov_ode||_F / ||cov_ode||_F
  double cov_error = 0.0;
};

/// Runs the scenario at spacing h, h/2, ... with dt refined alongside.
std::vector<OracleRow> oracle_refinement(const OracleScenario& scenario);

/// log2 of successive error ratios.
std::vector<double> observed_orders(const std::vector<double>& errors);

/// Drives the moment equations with drifts rebuilt from a smooth, non-commuting
/// 2D mean/covariance path for diffusion eps and 2 eps, and returns the largest
/// difference between the two trajectories (means and covariances).
double epsilon_invariance_gap(double eps, double dt, double final_time);

}  // namespace evoclust
