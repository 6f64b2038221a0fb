#pragma once

#include <vector>

#include "evoclust/estep.hpp"

namespace evoclust {

enum class KernelKind { dirac, asymmetric, symmetric };

/// Causal exponential kernel on [0, tau]; zero outside and at s = tau.
double asym_kernel(double s, double tau);

/// Symmetric mollifier on (-tau/2, tau/2); zero at and beyond the endpoints.
double sym_kernel(double s, double tau);

/// C = integral over [-1, 1] of exp(-1 / (1 - s^2)), by adaptive Simpson quadrature (computed once).
double mollifier_constant();

/// Kernel sampled at time-grid offsets. Offset j weights the value at t_n - j dt, so causal
/// kernels use j >= 0 only.
struct TemporalKernel {
  KernelKind kind = KernelKind::dirac;
  double tau = 0.0;
  double dt = 0.0;
  int first_offset = 0;
  int last_offset = 0;
  /// weights[j - first_offset]; sum_j w_j dt = 1.
  std::vector<double> weights;
  /// sum_j g(j dt) dt before renormalization.
  double raw_sum = 1.0;

  double weight(int j) const {
    return j < first_offset || j > last_offset ? 0.0 : weights[static_cast<std::size_t>(j - first_offset)];
  }
};

TemporalKernel discretize_kernel(KernelKind kind, double tau, double dt);

/// Kernel-smoothed weight/mean/covariance at node n:
///   alpha~ = g*alpha,  mu~ = g*(alpha mu) / g*alpha,  Sigma~ = g*(alpha Sigma) / g*alpha.
/// Offsets reaching past the last stored node are dropped and the remaining weights renormalized;
/// offsets before the first stored node raise an insufficient-history error. The dirac kernel returns
/// the node's statistics unchanged.
EStepStats smooth_at(const StatsSeries& series, int n, const TemporalKernel& g, double alpha_floor = 1e-8);

/// smooth_at for every node in [first, last]; the result is indexed like the input.
StatsSeries smooth_series(const StatsSeries& series, const TemporalKernel& g, int first, int last,
                          double alpha_floor = 1e-8);

/// The covariance term dropped by the smoothed maximizer:
///   g*(alpha (mu - mu~)(mu - mu~)^T) / g*alpha, per component.
std::vector<Mat> centroid_variability(const StatsSeries& series, int n, const TemporalKernel& g,
                                      const EStepStats& smoothed);

}  // namespace evoclust
