#pragma once

#include <span>
#include <vector>

#include "evoclust/estep.hpp"

namespace evoclust {

/// Affine drift B(x) = V (x - M) of one component.
struct ComponentDrift {
  Mat rate;       // V, symmetric positive definite, units 1/time
  Vec attractor;  // M
  bool frozen = false;

  Vec operator()(const Vec& x) const { return rate * (x - attractor); }
};

struct DriftSpec {
  double time = 0.0;
  std::vector<ComponentDrift> components;
};

enum class DerivativeScheme { backward, centered };

struct DriftOptions {
  double epsilon = 1.0;
  double dt = 1e-3;
  /// Lower eigenvalue clamp on V; <= 0 selects 1e-6 / dt.
  double v_floor = 0.0;
  /// ||Sigma Sigma' - Sigma' Sigma||_F <= tol ||Sigma||_F ||Sigma'||_F selects the closed form over Sylvester.
  double commutator_tol = 1e-10;
  DerivativeScheme derivative = DerivativeScheme::backward;

  double effective_v_floor() const { return v_floor > 0.0 ? v_floor : 1e-6 / dt; }
};

/// (s_n - s_{n-1}) / dt; zero at n = 0.
template <class T>
T backward_diff(std::span<const T> series, std::size_t n, double dt) {
  if (n == 0) return T(series[0] * 0.0);
  return T((series[n] - series[n - 1]) / dt);
}

/// Solves Sigma X + X Sigma = rhs for SPD Sigma in Sigma's eigenbasis.
Mat solve_sylvester(const Mat& sigma, const Mat& rhs);

/// V with Sigma V + V Sigma = 2 eps I - Sigma'. Uses 1/2 Sigma^{-1} (2 eps I - Sigma') when Sigma and
/// Sigma' commute, the Sylvester solve otherwise; eigenvalues are then clamped to >= v_floor.
Mat compute_V(const Mat& sigma, const Mat& dsigma, double eps, double v_floor, double commutator_tol = 1e-10);

/// M = mu + V^{-1} mu'.
Vec compute_M(const Vec& mu, const Vec& dmu, const Mat& V);

/// Drift for every component at node n from a statistics series (raw for the instantaneous model,
/// kernel-smoothed for the averaged ones). Frozen components get V = v_floor I, M = mu_n.
DriftSpec build_drift(const StatsSeries& series, int n, const DriftOptions& options);

}  // namespace evoclust
