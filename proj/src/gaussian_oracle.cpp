#include "evoclust/gaussian_oracle.hpp"

#include <cmath>
#include <numbers>

#include "evoclust/errors.hpp"

namespace evoclust {

namespace {

struct Rate {
  Vec dmean;
  Mat dcov;
};

Rate rhs(const Vec& mean, const Mat& cov, const Mat& V, const Vec& M, double eps) {
  const int d = static_cast<int>(mean.size());
  return {-V * (mean - M), 2.0 * eps * identity(d) - cov * V - V * cov};
}

GaussianMoments finish(const GaussianMoments& state, Vec mean, Mat cov, double dt) {
  GaussianMoments out{std::move(mean), symmetrize(cov), state.time + dt};
  if (!is_spd(out.cov)) throw NumericalError("oracle covariance lost positive definiteness");
  return out;
}

}  // namespace

double GaussianMoments::normalization() const {
  const double d = static_cast<double>(mean.size());
  return 1.0 / std::sqrt(std::pow(2.0 * std::numbers::pi, d) * cov.determinant());
}

GaussianMoments ode_step(const GaussianMoments& state, const Mat& V, const Vec& M, double eps, double dt) {
  const DriftCoefficients fixed = [&](double) { return std::pair<Mat, Vec>(V, M); };
  return ode_step(state, fixed, eps, dt);
}

GaussianMoments ode_step(const GaussianMoments& state, const DriftCoefficients& coefficients, double eps,
                         double dt) {
  const double t = state.time;
  const auto [v1, m1] = coefficients(t);
  const Rate k1 = rhs(state.mean, state.cov, v1, m1, eps);
  const auto [v2, m2] = coefficients(t + 0.5 * dt);
  const Rate k2 = rhs(state.mean + 0.5 * dt * k1.dmean, state.cov + 0.5 * dt * k1.dcov, v2, m2, eps);
  const Rate k3 = rhs(state.mean + 0.5 * dt * k2.dmean, state.cov + 0.5 * dt * k2.dcov, v2, m2, eps);
  const auto [v4, m4] = coefficients(t + dt);
  const Rate k4 = rhs(state.mean + dt * k3.dmean, state.cov + dt * k3.dcov, v4, m4, eps);
  Vec mean = state.mean + dt / 6.0 * (k1.dmean + 2.0 * k2.dmean + 2.0 * k3.dmean + k4.dmean);
  Mat cov = state.cov + dt / 6.0 * (k1.dcov + 2.0 * k2.dcov + 2.0 * k3.dcov + k4.dcov);
  return finish(state, std::move(mean), std::move(cov), dt);
}

std::vector<GaussianMoments> integrate(const GaussianMoments& initial, const DriftCoefficients& coefficients,
                                       double eps, double dt, int steps) {
  std::vector<GaussianMoments> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(initial);
  for (int n = 0; n < steps; ++n) out.push_back(ode_step(out.back(), coefficients, eps, dt));
  return out;
}

double log_normalization_rate(const GaussianMoments& state, const Mat& V, double eps) {
  return V.trace() - eps * state.cov.inverse().trace();
}

double eval_density(const GaussianMoments& state, const Vec& x) {
  const Vec r = x - state.mean;
  const double q = r.dot(state.cov.ldlt().solve(r));
  return state.normalization() * std::exp(-0.5 * q);
}

DensityField grid_gaussian(const GaussianMoments& state, const GridPtr& grid, bool normalize) {
  DensityField out(grid, state.time);
  const double c = state.normalization();
  const Mat precision = state.cov.inverse();
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vec r = grid->barycenter(i) - state.mean;
    out.values[i] = c * std::exp(-0.5 * r.dot(precision * r));
  }
  if (normalize) out.normalize();
  return out;
}

GridMoments grid_moments(const DensityField& m) {
  const SpatialGrid& g = *m.grid;
  const int d = g.dim();
  GridMoments out{0.0, zero_vec(d), zero_mat(d)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.mass += m.values[i];
    out.mean += m.values[i] * g.barycenter(i);
  }
  if (out.mass <= 0.0) return {0.0, zero_vec(d), zero_mat(d)};
  out.mean /= out.mass;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec r = g.barycenter(i) - out.mean;
    out.cov += m.values[i] * (r * r.transpose());
  }
  out.cov /= out.mass;
  out.mass *= g.cell_measure();
  return out;
}

}  // namespace evoclust
