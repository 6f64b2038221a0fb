#include "evoclust/verification.hpp"

#include <cmath>
#include <numbers>

#include "evoclust/errors.hpp"

namespace evoclust {

std::vector<OracleRow> oracle_refinement(const OracleScenario& s) {
  std::vector<OracleRow> rows;
  const ComponentDrift drift{s.rate, s.attractor, false};
  double h = s.spacing;
  double dt = s.dt;
  for (int level = 0; level < s.refinements; ++level, h /= 2.0, dt /= 2.0) {
    std::vector<int> nodes;
    for (const Interval& b : s.bounds) nodes.push_back(nodes_for_spacing(b, h));
    const GridPtr grid = build_spatial_grid(s.bounds, nodes);
    const int steps = static_cast<int>(std::lround(s.final_time / dt));
    GaussianMoments ode{s.mean0, s.cov0, 0.0};
    DensityField m = grid_gaussian(ode, grid);
    const EvolutionOperator op = assemble_operator(drift, s.epsilon, dt, grid, s.fp);
    for (int n = 0; n < steps; ++n) {
      m = step(m, op);
      ode = ode_step(ode, s.rate, s.attractor, s.epsilon, dt);
    }
    const GridMoments gm = grid_moments(m);
    OracleRow row;
    row.spacing = h;
    row.dt = dt;
    row.steps = steps;
    row.mean_fp = gm.mean;
    row.mean_ode = ode.mean;
    row.cov_fp = gm.cov;
    row.cov_ode = ode.cov;
    row.mass = gm.mass;
    row.mean_error = (gm.mean - ode.mean).norm() / ode.mean.norm();
    row.cov_error = (gm.cov - ode.cov).norm() / ode.cov.norm();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) out.push_back(std::log2(errors[i - 1] / errors[i]));
  return out;
}

namespace {

struct Path {
  Vec mu;
  Vec dmu;
  Mat sigma;
  Mat dsigma;
};

// Rotating anisotropic covariance, so Sigma and Sigma' do not commute.
Path synthetic_path(double t) {
  const double pi = std::numbers::pi;
  Path p;
  p.mu = Vec(2);
  p.mu << 0.5 + 0.2 * std::sin(pi * t), 0.4 + 0.1 * std::cos(pi * t);
  p.dmu = Vec(2);
  p.dmu << 0.2 * pi * std::cos(pi * t), -0.1 * pi * std::sin(pi * t);
  const double th = 0.3 * t;
  Mat r(2, 2), dr(2, 2), d(2, 2), dd(2, 2);
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  dr << -std::sin(th), -std::cos(th), std::cos(th), -std::sin(th);
  dr *= 0.3;
  d << 0.04 + 0.01 * std::sin(t), 0.0, 0.0, 0.02;
  dd << 0.01 * std::cos(t), 0.0, 0.0, 0.0;
  p.sigma = r * d * r.transpose();
  p.dsigma = dr * d * r.transpose() + r * dd * r.transpose() + r * d * dr.transpose();
  return p;
}

}  // namespace

double epsilon_invariance_gap(double eps, double dt, double final_time) {
  const int steps = static_cast<int>(std::lround(final_time / dt));
  auto coefficients = [](double e) {
    return [e](double t) {
      const Path p = synthetic_path(t);
      const Mat V = compute_V(p.sigma, p.dsigma, e, 0.0);
      return std::pair<Mat, Vec>{V, compute_M(p.mu, p.dmu, V)};
    };
  };
  const Path start = synthetic_path(0.0);
  const GaussianMoments initial{start.mu, start.sigma, 0.0};
  const auto a = integrate(initial, coefficients(eps), eps, dt, steps);
  const auto b = integrate(initial, coefficients(2.0 * eps), 2.0 * eps, dt, steps);
  double gap = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    gap = std::max(gap, (a[n].mean - b[n].mean).cwiseAbs().maxCoeff());
    gap = std::max(gap, (a[n].cov - b[n].cov).cwiseAbs().maxCoeff());
  }
  return gap;
}

}  // namespace evoclust
