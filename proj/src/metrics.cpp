#include "evoclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "evoclust/errors.hpp"

namespace evoclust {

namespace {

struct Cell {
  int row;
  int col;
  double flow;
};

class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> supply, std::span<const double> demand,
                   const std::vector<std::vector<double>>& cost)
      : n_(static_cast<int>(supply.size())), m_(static_cast<int>(demand.size())), cost_(cost),
        row_cells_(n_), col_cells_(m_), u_(n_), v_(m_) {
    initial_basis(supply, demand);
  }

  void optimize() {
    double scale = 0.0;
    for (const auto& r : cost_)
      for (double c : r) scale = std::max(scale, std::abs(c));
    const double tol = 1e-13 * (scale + 1.0);
    const long max_pivots = 50L * (n_ + m_) * (n_ + m_) + 1000;
    int stalled = 0;
    for (long pivot = 0; pivot < max_pivots; ++pivot) {
      potentials();
      const bool bland = stalled > 2 * (n_ + m_);
      int p = -1, q = -1;
      double best = -tol;
      for (int i = 0; i < n_ && !(bland && p >= 0); ++i)
        for (int j = 0; j < m_; ++j) {
          const double r = cost_[i][j] - u_[i] - v_[j];
          if (r < best) {
            best = bland ? -tol : r;
            p = i;
            q = j;
            if (bland) break;
          }
        }
      if (p < 0) return;
      const double moved = pivot_in(p, q);
      stalled = moved > 0.0 ? 0 : stalled + 1;
    }
    throw NumericalError("transport: simplex did not terminate");
  }

  TransportPlan plan() const {
    TransportPlan out;
    for (const Cell& c : cells_) {
      if (c.flow <= 0.0) continue;
      out.source.push_back(static_cast<std::size_t>(c.row));
      out.target.push_back(static_cast<std::size_t>(c.col));
      out.mass.push_back(c.flow);
      out.cost += c.flow * cost_[c.row][c.col];
    }
    return out;
  }

 private:
  void add_cell(int i, int j, double x) {
    const int id = static_cast<int>(cells_.size());
    cells_.push_back({i, j, x});
    row_cells_[i].push_back(id);
    col_cells_[j].push_back(id);
  }

  void remove_cell(int id) {
    auto drop = [](std::vector<int>& list, int value) { list.erase(std::find(list.begin(), list.end(), value)); };
    const int last = static_cast<int>(cells_.size()) - 1;
    drop(row_cells_[cells_[id].row], id);
    drop(col_cells_[cells_[id].col], id);
    if (id != last) {
      const Cell moved = cells_[last];
      std::replace(row_cells_[moved.row].begin(), row_cells_[moved.row].end(), last, id);
      std::replace(col_cells_[moved.col].begin(), col_cells_[moved.col].end(), last, id);
      cells_[id] = moved;
    }
    cells_.pop_back();
  }

  // Least-cost rule; each allocation retires one row or column (both on the last), giving a
  // spanning tree of n + m - 1 basic cells.
  void initial_basis(std::span<const double> supply, std::span<const double> demand) {
    std::vector<double> ra(supply.begin(), supply.end());
    std::vector<double> rb(demand.begin(), demand.end());
    std::vector<std::tuple<double, int, int>> order;
    order.reserve(static_cast<std::size_t>(n_) * m_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < m_; ++j) order.emplace_back(cost_[i][j], i, j);
    std::sort(order.begin(), order.end());
    std::vector<bool> row_done(n_, false), col_done(m_, false);
    int rows_left = n_, cols_left = m_;
    for (const auto& [c, i, j] : order) {
      if (row_done[i] || col_done[j]) continue;
      const double x = std::min(ra[i], rb[j]);
      add_cell(i, j, x);
      ra[i] -= x;
      rb[j] -= x;
      if (rows_left == 1 && cols_left == 1) break;
      if ((ra[i] <= rb[j] && rows_left > 1) || cols_left == 1) {
        row_done[i] = true;
        --rows_left;
        rb[j] += ra[i];  // keep any round-off with the column that stays open
      } else {
        col_done[j] = true;
        --cols_left;
        ra[i] += rb[j];
      }
    }
  }

  void potentials() {
    std::vector<bool> row_seen(n_, false), col_seen(m_, false);
    std::vector<int> stack;
    for (int root = 0; root < n_; ++root) {
      if (row_seen[root]) continue;
      row_seen[root] = true;
      u_[root] = 0.0;
      stack.push_back(root);
      while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        if (node < n_) {
          for (int id : row_cells_[node]) {
            const Cell& c = cells_[id];
            if (col_seen[c.col]) continue;
            col_seen[c.col] = true;
            v_[c.col] = cost_[c.row][c.col] - u_[c.row];
            stack.push_back(n_ + c.col);
          }
        } else {
          for (int id : col_cells_[node - n_]) {
            const Cell& c = cells_[id];
            if (row_seen[c.row]) continue;
            row_seen[c.row] = true;
            u_[c.row] = cost_[c.row][c.col] - v_[c.col];
            stack.push_back(c.row);
          }
        }
      }
    }
  }

  // Tree path from row p to column q as a list of cell ids.
  std::vector<int> tree_path(int p, int q) const {
    const int total = n_ + m_;
    std::vector<int> via(total, -2);
    std::vector<int> queue{p};
    via[p] = -1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int node = queue[head];
      if (node == n_ + q) break;
      const auto& list = node < n_ ? row_cells_[node] : col_cells_[node - n_];
      for (int id : list) {
        const Cell& c = cells_[id];
        const int next = node < n_ ? n_ + c.col : c.row;
        if (via[next] != -2) continue;
        via[next] = id;
        queue.push_back(next);
      }
    }
    std::vector<int> path;
    for (int node = n_ + q; node != p;) {
      const int id = via[node];
      path.push_back(id);
      const Cell& c = cells_[id];
      node = node >= n_ ? c.row : n_ + c.col;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  double pivot_in(int p, int q) {
    const std::vector<int> path = tree_path(p, q);
    // Along the path from row p the cells alternate -, +, -, ...; the entering cell is +.
    int leaving = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < path.size(); s += 2) {
      const Cell& c = cells_[path[s]];
      if (c.flow < theta || (c.flow == theta && std::tie(c.row, c.col) < std::tie(cells_[leaving].row, cells_[leaving].col))) {
        theta = c.flow;
        leaving = path[s];
      }
    }
    for (std::size_t s = 0; s < path.size(); ++s) cells_[path[s]].flow += s % 2 == 0 ? -theta : theta;
    cells_[leaving].flow = 0.0;
    remove_cell(leaving);
    add_cell(p, q, theta);
    return theta;
  }

  int n_;
  int m_;
  const std::vector<std::vector<double>>& cost_;
  std::vector<Cell> cells_;
  std::vector<std::vector<int>> row_cells_;
  std::vector<std::vector<int>> col_cells_;
  std::vector<double> u_;
  std::vector<double> v_;
};

std::vector<double> unit_masses(const DensityField& f) {
  const double total = std::accumulate(f.values.begin(), f.values.end(), 0.0);
  if (!(total > 0.0)) throw ConfigError("w1: field has no mass");
  std::vector<double> out(f.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.values[i] / total;
  return out;
}

}  // namespace

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              const std::vector<std::vector<double>>& cost) {
  if (supply.empty() || demand.empty()) throw ConfigError("transport: empty marginals");
  if (cost.size() != supply.size()) throw ConfigError("transport: cost rows do not match supply");
  for (const auto& row : cost)
    if (row.size() != demand.size()) throw ConfigError("transport: cost columns do not match demand");
  for (double x : supply)
    if (x < 0.0) throw ConfigError("transport: negative supply");
  for (double x : demand)
    if (x < 0.0) throw ConfigError("transport: negative demand");
  const double sa = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double sb = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(sa - sb) > 1e-9 * std::max(1.0, sa)) throw ConfigError("transport: unbalanced marginals");
  TransportSimplex simplex(supply, demand, cost);
  simplex.optimize();
  return simplex.plan();
}

double w1_1d(const DensityField& f, const DensityField& m) {
  if (f.grid->dim() != 1) throw ConfigError("w1_1d: fields must be one-dimensional");
  require_same_grid(*f.grid, *m.grid, "w1_1d");
  const std::vector<double> a = unit_masses(f);
  const std::vector<double> b = unit_masses(m);
  double fa = 0.0, fb = 0.0, sum = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    fa += a[i];
    fb += b[i];
    sum += std::abs(fa - fb);
  }
  return f.grid->spacing(0) * sum;
}

TransportPlan w1_lp_oracle(const DensityField& f, const DensityField& m) {
  require_same_grid(*f.grid, *m.grid, "w1_lp_oracle");
  const SpatialGrid& g = *f.grid;
  if (g.size() > 200) throw ConfigError("w1_lp_oracle: at most 200 nodes");
  const std::vector<double> a = unit_masses(f);
  const std::vector<double> b = unit_masses(m);
  std::vector<std::vector<double>> cost(g.size(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) cost[i][j] = (g.barycenter(i) - g.barycenter(j)).norm();
  return solve_transport(a, b, cost);
}

DensityField coarsen(const DensityField& m, std::size_t max_nodes) {
  const SpatialGrid& g = *m.grid;
  if (g.size() <= max_nodes) return m;
  const int d = g.dim();
  int factor = 1;
  auto coarse_count = [&](int q) {
    std::size_t c = 1;
    for (int a = 0; a < d; ++a) c *= static_cast<std::size_t>((g.nodes(a) + q - 1) / q);
    return c;
  };
  while (coarse_count(factor) > max_nodes) ++factor;
  std::vector<Interval> bounds;
  std::vector<int> nodes;
  for (int a = 0; a < d; ++a) {
    const int c = (g.nodes(a) + factor - 1) / factor;
    nodes.push_back(c);
    bounds.push_back({g.bounds(a).lower, g.bounds(a).lower + c * factor * g.spacing(a)});
  }
  const GridPtr coarse = build_spatial_grid(bounds, nodes);
  DensityField out(coarse, m.time);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    const std::size_t target = coarse->flat_index(idx[0] / factor, d == 2 ? idx[1] / factor : 0);
    out.values[target] += m.values[i] * g.cell_measure();
  }
  for (double& v : out.values) v /= coarse->cell_measure();
  return out;
}

double w1(const DensityField& f, const DensityField& m, bool* approximate) {
  if (f.grid->dim() == 1) {
    if (approximate) *approximate = false;
    return w1_1d(f, m);
  }
  if (approximate) *approximate = f.grid->size() > 200;
  return w1_lp_oracle(coarsen(f, 200), coarsen(m, 200)).cost;
}

double centroid_error(std::span<const Vec> est, std::span<const Vec> truth) {
  if (est.empty() || truth.empty()) throw ConfigError("centroid_error: empty centroid list");
  const bool swap = est.size() > truth.size();
  std::span<const Vec> small = swap ? truth : est;
  std::span<const Vec> large = swap ? est : truth;
  std::vector<std::size_t> perm(large.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double e = 0.0;
    for (std::size_t k = 0; k < small.size(); ++k) e += (small[k] - large[perm[k]]).lpNorm<1>();
    best = std::min(best, e);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double total_variation(std::span<const std::vector<double>> series) {
  double tv = 0.0;
  for (std::size_t n = 1; n < series.size(); ++n)
    for (std::size_t c = 0; c < series[n].size(); ++c) tv += std::abs(series[n][c] - series[n - 1][c]);
  return tv;
}

double total_variation(std::span<const std::vector<Vec>> series) {
  double tv = 0.0;
  for (std::size_t n = 1; n < series.size(); ++n)
    for (std::size_t k = 0; k < series[n].size(); ++k) tv += (series[n][k] - series[n - 1][k]).lpNorm<1>();
  return tv;
}

std::vector<int> hard_clusters(const ResponsibilityField& gamma, const DensityField& f) {
  require_same_grid(*gamma.grid, *f.grid, "hard_clusters");
  std::vector<int> out(f.values.size(), -1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(f.values[i] > 0.0)) continue;
    int best = 0;
    for (int k = 1; k < gamma.components; ++k)
      if (gamma(k, i) > gamma(best, i)) best = k;
    out[i] = best;
  }
  return out;
}

int alignment_lag(std::span<const std::vector<double>> lagged, std::span<const std::vector<double>> reference,
                  int max_lag) {
  const int n = static_cast<int>(std::min(lagged.size(), reference.size()));
  int best_lag = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int step = 0; step <= 2 * max_lag; ++step) {
    const int l = step % 2 == 0 ? step / 2 : -(step + 1) / 2;
    double sum = 0.0;
    int count = 0;
    for (int i = std::max(0, l); i < n && i - l < n; ++i) {
      for (std::size_t c = 0; c < lagged[i].size(); ++c) {
        const double diff = lagged[i][c] - reference[i - l][c];
        sum += diff * diff;
      }
      ++count;
    }
    if (count == 0) continue;
    const double mse = sum / count;
    if (mse < best) {
      best = mse;
      best_lag = l;
    }
  }
  return best_lag;
}

std::vector<std::vector<double>> stacked_centroids(const Trajectory& trajectory) {
  std::vector<std::vector<double>> out;
  out.reserve(trajectory.centroids.size());
  for (const auto& node : trajectory.centroids) {
    std::vector<double> row;
    for (const Vec& c : node)
      for (Eigen::Index a = 0; a < c.size(); ++a) row.push_back(c(a));
    out.push_back(std::move(row));
  }
  return out;
}

FrameObserver MetricCollector::observer() {
  return [this](const Frame& frame) {
    const DensityField mix = mixture_density(frame.weights, frame.components);
    bool approx = false;
    w1_.push_back(w1(*frame.data, mix, &approx));
    approximate_ = approximate_ || approx;
  };
}

MetricSeries MetricCollector::finish(const Trajectory& trajectory, const DataDensity& data) const {
  MetricSeries out;
  const std::size_t nodes = trajectory.centroids.size();
  const bool analytic = data.kind() != DataKind::gridded;
  for (std::size_t n = 0; n < nodes; ++n) {
    const double t = trajectory.time(static_cast<int>(n));
    out.time.push_back(t);
    if (analytic) {
      const std::vector<Vec> truth = data.exact_centroids(t);
      out.centroid_error.push_back(centroid_error(trajectory.centroids[n], truth));
    }
    double drift = 0.0;
    const auto& mass = trajectory.diagnostics[n].component_mass;
    const auto& mass0 = trajectory.diagnostics.front().component_mass;
    for (std::size_t k = 0; k < mass.size() && k < mass0.size(); ++k) drift = std::max(drift, std::abs(mass[k] - mass0[k]));
    out.mass_drift.push_back(drift);
  }
  out.w1 = w1_;
  out.w1_approximate = approximate_;
  out.tv_alpha = total_variation(std::span<const std::vector<double>>(trajectory.weights));
  out.tv_centroids = total_variation(std::span<const std::vector<Vec>>(trajectory.centroids));
  return out;
}

}  // namespace evoclust
