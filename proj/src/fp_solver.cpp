#include "evoclust/fp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evoclust/errors.hpp"

namespace evoclust {

namespace {

struct AxisWeights {
  int index[2];
  double weight[2];
};

// Linear interpolation weights onto cell centers along one axis, clipped at the ends.
AxisWeights axis_weights(const SpatialGrid& grid, int axis, double y) {
  const int n = grid.nodes(axis);
  double p = (y - grid.bounds(axis).lower) / grid.spacing(axis) - 0.5;
  p = std::clamp(p, 0.0, static_cast<double>(n - 1));
  int i = static_cast<int>(std::floor(p));
  if (i >= n - 1) i = n - 2;
  const double theta = p - i;
  return {{i, i + 1}, {1.0 - theta, theta}};
}

// Variance of the two-node linear interpolation of a point at y.
double interpolation_variance(const SpatialGrid& grid, int axis, double y) {
  const AxisWeights w = axis_weights(grid, axis, y);
  const double h = grid.spacing(axis);
  return w.weight[0] * w.weight[1] * h * h;
}

// Displacement r along `axis` such that the 2d deposited points have variance `target` about the
// foot y along that axis. Zero when interpolation alone already exceeds the target.
// Between the radii where y +- r crosses a cell center the deposited variance is linear in r
// (the r^2 terms cancel), so the root is found by walking those crossings.
double matched_displacement(const SpatialGrid& grid, int axis, double y, double target) {
  const int d = grid.dim();
  const double base = interpolation_variance(grid, axis, y);
  auto excess = [&](double r) {
    return (r * r + 0.5 * (interpolation_variance(grid, axis, y + r) + interpolation_variance(grid, axis, y - r)) +
            (d - 1) * base) / d - target;
  };
  double lo = 0.0;
  double f_lo = excess(0.0);
  if (f_lo >= 0.0) return 0.0;
  const double top = std::sqrt(d * target);

  const double h = grid.spacing(axis);
  const double first = grid.coord(axis, 0);
  const int n = grid.nodes(axis);
  const double p = (y - first) / h;
  std::vector<double> breaks;
  for (int i = std::max(0, static_cast<int>(std::floor(p)) + 1); i < n; ++i) {
    const double r = grid.coord(axis, i) - y;
    if (r >= top) break;
    if (r > 0.0) breaks.push_back(r);
  }
  for (int i = std::min(n - 1, static_cast<int>(std::ceil(p)) - 1); i >= 0; --i) {
    const double r = y - grid.coord(axis, i);
    if (r >= top) break;
    if (r > 0.0) breaks.push_back(r);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(top);

  for (double b : breaks) {
    const double f_b = excess(b);
    if (f_b < 0.0) {
      lo = b;
      f_lo = f_b;
      continue;
    }
    double r = lo + (b - lo) * (-f_lo) / (f_b - f_lo);
    // Clipping at the domain ends makes the piece quadratic; refine by bisection there.
    if (std::abs(excess(r)) > 1e-12 * target) {
      double a = lo, c = b;
      for (int it = 0; it < 100 && c - a > 1e-15 * c; ++it) {
        r = 0.5 * (a + c);
        (excess(r) < 0.0 ? a : c) = r;
      }
      r = 0.5 * (a + c);
    }
    return r;
  }
  return top;
}

}  // namespace

double EvolutionOperator::column_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t e = offset[j]; e < offset[j + 1]; ++e) s += weight[e];
  return s;
}

double cfl_number(const ComponentDrift& b, double dt, const SpatialGrid& grid, const DensityField* m,
                  double support_cutoff) {
  double threshold = -1.0;
  if (m != nullptr && support_cutoff > 0.0) {
    const double peak = *std::max_element(m->values.begin(), m->values.end());
    threshold = support_cutoff * peak;
  }
  double vmax = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (threshold >= 0.0 && m->values[i] <= threshold) continue;
    vmax = std::max(vmax, b(grid.barycenter(i)).cwiseAbs().maxCoeff());
  }
  return dt * vmax / grid.min_spacing();
}

EvolutionOperator assemble_operator(const ComponentDrift& b, double eps, double dt, const GridPtr& grid,
                                    const FpOptions& options, const DensityField* support) {
  const SpatialGrid& g = *grid;
  const int d = g.dim();
  const double cfl = cfl_number(b, dt, g, support, options.support_cutoff);
  if (cfl > options.cfl_max)
    throw CflError("CFL number " + std::to_string(cfl) + " exceeds " + std::to_string(options.cfl_max), cfl);
  const double r = std::sqrt(2.0 * d * eps * dt);
  for (int a = 0; a < d; ++a)
    if (r > g.bounds(a).extent() / 4.0)
      throw CflError("diffusion displacement exceeds a quarter of the domain", cfl);

  EvolutionOperator op;
  op.grid = grid;
  op.dt = dt;
  op.cfl = cfl;
  const std::size_t per_source = static_cast<std::size_t>(2 * d) * (d == 1 ? 2 : 4);
  op.offset.reserve(g.size() + 1);
  op.target.reserve(g.size() * per_source);
  op.weight.reserve(g.size() * per_source);
  op.offset.push_back(0);
  const double share = 1.0 / (2.0 * d);

  for (std::size_t j = 0; j < g.size(); ++j) {
    const Vec x = g.barycenter(j);
    const Vec foot = x - dt * b(x);
    for (int s = 0; s < d; ++s) {
      const double rs = options.moment_matched ? matched_displacement(g, s, foot(s), 2.0 * eps * dt) : r;
      for (double sign : {-1.0, 1.0}) {
        Vec y = foot;
        y(s) += sign * rs;
        const AxisWeights w0 = axis_weights(g, 0, y(0));
        if (d == 1) {
          for (int p = 0; p < 2; ++p) {
            op.target.push_back(static_cast<std::uint32_t>(w0.index[p]));
            op.weight.push_back(share * w0.weight[p]);
          }
        } else {
          const AxisWeights w1 = axis_weights(g, 1, y(1));
          for (int q = 0; q < 2; ++q)
            for (int p = 0; p < 2; ++p) {
              op.target.push_back(static_cast<std::uint32_t>(g.flat_index(w0.index[p], w1.index[q])));
              op.weight.push_back(share * w0.weight[p] * w1.weight[q]);
            }
        }
      }
    }
    op.offset.push_back(op.target.size());
  }
  return op;
}

DensityField step(const DensityField& m, const EvolutionOperator& a) {
  require_same_grid(*m.grid, *a.grid, "step");
  DensityField out(m.grid, m.time + a.dt);
  for (std::size_t j = 0; j < m.values.size(); ++j) {
    const double v = m.values[j];
    if (v == 0.0) continue;
    for (std::size_t e = a.offset[j]; e < a.offset[j + 1]; ++e) out.values[a.target[e]] += a.weight[e] * v;
  }
  return out;
}

std::vector<DensityField> evolve(const DensityField& m0, std::span<const ComponentDrift> drifts, double eps,
                                 const TimeGrid& time_grid, const FpOptions& options) {
  const int steps = time_grid.steps();
  if (drifts.size() < static_cast<std::size_t>(steps)) throw Error("evolve: fewer drifts than time steps");
  std::vector<DensityField> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(m0);
  for (int n = 1; n <= steps; ++n) {
    const DensityField& prev = out.back();
    try {
      const EvolutionOperator a = assemble_operator(drifts[static_cast<std::size_t>(n - 1)], eps, time_grid.dt(),
                                                    prev.grid, options, &prev);
      DensityField next = step(prev, a);
      next.time = time_grid.time(n);
      out.push_back(std::move(next));
    } catch (const CflError& e) {
      throw CflError(std::string(e.what()) + " at step " + std::to_string(n), e.cfl(), n);
    }
  }
  return out;
}

Advance advance(const DensityField& m, const ComponentDrift& b, double eps, double dt, const FpOptions& options) {
  const double cfl = cfl_number(b, dt, *m.grid, &m, options.support_cutoff);
  const int substeps = std::max(1, static_cast<int>(std::ceil(cfl / options.cfl_max * (1.0 - 1e-12))));
  if (substeps > options.max_substeps)
    throw CflError("CFL number " + std::to_string(cfl) + " needs more than " +
                       std::to_string(options.max_substeps) + " substeps",
                   cfl);
  const double h = dt / substeps;
  // The substep length was fixed from the support of m; the operator is reused for every substep.
  FpOptions unchecked = options;
  unchecked.cfl_max = std::numeric_limits<double>::infinity();
  const EvolutionOperator a = assemble_operator(b, eps, h, m.grid, unchecked);
  Advance out{m, substeps, cfl};
  for (int s = 0; s < substeps; ++s) out.density = step(out.density, a);
  out.density.time = m.time + dt;
  return out;
}

}  // namespace evoclust
