#include "evoclust/estep.hpp"

#include <cmath>
#include <string>

#include "evoclust/errors.hpp"

namespace evoclust {

std::vector<double> EStepStats::alphas() const {
  std::vector<double> a;
  a.reserve(components.size());
  for (const auto& c : components) a.push_back(c.alpha);
  return a;
}

double default_cov_floor(const SpatialGrid& grid) {
  const double e = grid.max_extent();
  return 1e-6 * e * e;
}

ResponsibilityField responsibilities(std::span<const double> weights, std::span<const DensityField> components) {
  if (components.empty()) throw ConfigError("responsibilities: no components");
  if (weights.size() != components.size()) throw ConfigError("responsibilities: weight/component count mismatch");
  const GridPtr& grid = components.front().grid;
  for (const auto& c : components) require_same_grid(*grid, *c.grid, "responsibilities");
  const std::size_t m = grid->size();
  const auto k_count = static_cast<int>(components.size());

  ResponsibilityField out;
  out.grid = grid;
  out.components = k_count;
  out.time = components.front().time;
  out.gamma.assign(static_cast<std::size_t>(k_count) * m, 0.0);
  constexpr double kGuard = 1e-30;
  for (std::size_t i = 0; i < m; ++i) {
    double denom = 0.0;
    for (int k = 0; k < k_count; ++k) denom += weights[k] * components[k].values[i];
    for (int k = 0; k < k_count; ++k) {
      out.gamma[static_cast<std::size_t>(k) * m + i] =
          denom < kGuard ? 1.0 / k_count : weights[k] * components[k].values[i] / denom;
    }
  }
  return out;
}

EStepStats estep_stats(const ResponsibilityField& gamma, const DensityField& f, const EStepOptions& options,
                       const EStepStats* previous) {
  require_same_grid(*gamma.grid, *f.grid, "estep_stats");
  const SpatialGrid& grid = *f.grid;
  const int d = grid.dim();
  const std::size_t m = grid.size();
  const double h = grid.cell_measure();
  const double cov_floor = options.cov_floor > 0.0 ? options.cov_floor : default_cov_floor(grid);

  std::vector<std::array<double, 2>> x(m);
  for (std::size_t i = 0; i < m; ++i)
    for (int a = 0; a < d; ++a) x[i][a] = grid.node_coord(i, a);

  // Data moments, used when a component has no mass and no history.
  Vec data_mean = zero_vec(d);
  Mat data_cov = zero_mat(d);
  {
    double mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mass += h * f.values[i];
      for (int a = 0; a < d; ++a) data_mean(a) += h * f.values[i] * x[i][a];
    }
    if (mass > 0.0) data_mean /= mass;
    for (std::size_t i = 0; i < m; ++i)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          data_cov(a, b) += h * f.values[i] * (x[i][a] - data_mean(a)) * (x[i][b] - data_mean(b));
    if (mass > 0.0) data_cov /= mass;
  }

  EStepStats out;
  out.time = f.time;
  out.components.resize(static_cast<std::size_t>(gamma.components));
  for (int k = 0; k < gamma.components; ++k) {
    const double* g = gamma.gamma.data() + static_cast<std::size_t>(k) * m;
    ComponentStats& s = out.components[k];
    double alpha = 0.0;
    Vec mu = zero_vec(d);
    for (std::size_t i = 0; i < m; ++i) {
      const double w = h * g[i] * f.values[i];
      alpha += w;
      for (int a = 0; a < d; ++a) mu(a) += w * x[i][a];
    }
    s.alpha = alpha;
    s.frozen = alpha < options.alpha_floor;
    if (s.frozen && previous != nullptr && previous->size() == gamma.components) {
      s.mean = previous->components[k].mean;
      s.cov = previous->components[k].cov;
      continue;
    }
    if (!(alpha > 0.0)) {
      s.mean = data_mean;
      s.cov = clamp_eigenvalues(data_cov, cov_floor);
      continue;
    }
    mu /= alpha;
    Mat cov = zero_mat(d);
    for (std::size_t i = 0; i < m; ++i) {
      const double w = h * g[i] * f.values[i];
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) cov(a, b) += w * (x[i][a] - mu(a)) * (x[i][b] - mu(b));
    }
    cov /= alpha;
    s.mean = mu;
    s.cov = clamp_eigenvalues(cov, cov_floor);
  }
  return out;
}

EStepStats estep(std::span<const double> weights, std::span<const DensityField> components, const DensityField& f,
                 const EStepOptions& options, const EStepStats* previous) {
  return estep_stats(responsibilities(weights, components), f, options, previous);
}

}  // namespace evoclust

namespace evoclust {

const EStepStats& StatsSeries::at(int n) const {
  if (!contains(n)) throw Error("stats series: node " + std::to_string(n) + " is outside the stored history");
  return items_[static_cast<std::size_t>(n - first_)];
}

EStepStats& StatsSeries::at(int n) {
  if (!contains(n)) throw Error("stats series: node " + std::to_string(n) + " is outside the stored history");
  return items_[static_cast<std::size_t>(n - first_)];
}

void StatsSeries::truncate_after(int n) {
  if (n < first_) {
    items_.clear();
  } else if (n < last()) {
    items_.resize(static_cast<std::size_t>(n - first_ + 1));
  }
}

}  // namespace evoclust
