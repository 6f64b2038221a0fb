#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "evoclust/density.hpp"

namespace evoclust {

/// Mean and covariance of one Gaussian component; the normalization is derived from the covariance.
struct GaussianMoments {
  Vec mean;
  Mat cov;
  double time = 0.0;

  /// ((2 pi)^d det T)^{-1/2}
  double normalization() const;
};

/// Drift coefficients (V(t), M(t)) as a function of time.
using DriftCoefficients = std::function<std::pair<Mat, Vec>(double)>;

/// One RK4 step of
///   nu' = -V (nu - M),   T' = 2 eps I - T V - V T
/// with V, M held fixed over the step. T is symmetrized afterwards; losing positive
/// definiteness throws NumericalError.
GaussianMoments ode_step(const GaussianMoments& state, const Mat& V, const Vec& M, double eps, double dt);

/// RK4 step with the coefficients re-evaluated at every stage.
GaussianMoments ode_step(const GaussianMoments& state, const DriftCoefficients& coefficients, double eps,
                         double dt);

/// `steps` RK4 steps from `initial`; returns every node including the first.
std::vector<GaussianMoments> integrate(const GaussianMoments& initial, const DriftCoefficients& coefficients,
                                       double eps, double dt, int steps);

/// d/dt log c = tr V - eps tr T^{-1}.
double log_normalization_rate(const GaussianMoments& state, const Mat& V, double eps);

double eval_density(const GaussianMoments& state, const Vec& x);

/// Gaussian sampled at the grid barycenters, optionally rescaled to unit quadrature mass.
DensityField grid_gaussian(const GaussianMoments& state, const GridPtr& grid, bool normalize = true);

struct GridMoments {
  double mass = 0.0;
  Vec mean;
  Mat cov;
};

/// Quadrature mass, mean and central covariance of a gridded density.
GridMoments grid_moments(const DensityField& m);

}  // namespace evoclust
