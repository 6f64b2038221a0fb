#include "evoclust/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <exception>
#include <random>
#include <thread>

#include "evoclust/errors.hpp"

namespace evoclust {

const char* model_name(Model m) {
  switch (m) {
    case Model::static_frames: return "static";
    case Model::instantaneous: return "instantaneous";
    case Model::asym_averaged: return "asym_averaged";
    case Model::sym_averaged: return "sym_averaged";
  }
  return "?";
}

Model parse_model(const std::string& name) {
  if (name == "static") return Model::static_frames;
  if (name == "instantaneous") return Model::instantaneous;
  if (name == "asym_averaged") return Model::asym_averaged;
  if (name == "sym_averaged") return Model::sym_averaged;
  throw ConfigError("model: unknown variant '" + name + "'");
}

KernelKind kernel_for(const RunConfig& c) {
  if (c.kernel) return *c.kernel;
  switch (c.model) {
    case Model::asym_averaged: return KernelKind::asymmetric;
    case Model::sym_averaged: return KernelKind::symmetric;
    default: return KernelKind::dirac;
  }
}

GridPtr GridSpec::build() const {
  std::vector<int> counts = nodes;
  if (counts.empty()) {
    if (!(spacing > 0.0)) throw ConfigError("grid.spacing: must be positive");
    for (const Interval& b : bounds) counts.push_back(nodes_for_spacing(b, spacing));
  }
  if (counts.size() != bounds.size()) throw ConfigError("grid.nodes: one count per axis required");
  return build_spatial_grid(bounds, counts);
}

DataDensity DatasetSpec::load() const {
  switch (kind) {
    case DataKind::test1: return DataDensity::test1(test1);
    case DataKind::test2: return DataDensity::test2(test2);
    case DataKind::gridded: return DataDensity::gridded(load_gridded_sequence(csv, sidecar));
  }
  throw ConfigError("dataset.kind: unknown");
}

void validate(const RunConfig& c) {
  if (c.components < 1) throw ConfigError("components: must be at least 1");
  if (!(c.final_time > 0.0)) throw ConfigError("final_time: must be positive");
  if (!(c.dt > 0.0) || c.dt > c.final_time) throw ConfigError("dt: must lie in (0, final_time]");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
  if (c.model == Model::asym_averaged || c.model == Model::sym_averaged) {
    if (!(c.tau > 0.0)) throw ConfigError("tau: must be positive for averaged models");
    if (c.tau < c.dt) throw ConfigError("tau: must be at least one time step");
  }
  if (c.model == Model::sym_averaged) {
    if (!(c.fixed_point.tol > 0.0)) throw ConfigError("fixed_point.tol: must be positive");
    if (c.fixed_point.max_iterations < 1) throw ConfigError("fixed_point.max_iterations: must be at least 1");
  }
  if (c.kernel && (c.model == Model::static_frames || c.model == Model::instantaneous))
    throw ConfigError("kernel: only averaged models take a kernel");
  if (!(c.fixed_point.damping > 0.0) || c.fixed_point.damping > 1.0)
    throw ConfigError("fixed_point.damping: must lie in (0, 1]");
  if (c.fixed_point.anderson_depth < 0) throw ConfigError("fixed_point.anderson_depth: must be non-negative");
  if (!(c.solver.fp.cfl_max > 0.0)) throw ConfigError("solver.cfl_max: must be positive");
  if (c.solver.fp.support_cutoff < 0.0 || c.solver.fp.support_cutoff >= 1.0)
    throw ConfigError("solver.support_cutoff: must lie in [0, 1)");
  if (c.solver.fp.max_substeps < 1) throw ConfigError("solver.max_substeps: must be at least 1");
  if (c.grid.bounds.empty() || c.grid.bounds.size() > 2) throw ConfigError("grid.bounds: one or two axes");
  const int data_dim = c.dataset.kind == DataKind::test1 ? 1 : c.dataset.kind == DataKind::test2 ? 2 : 0;
  if (data_dim != 0 && data_dim != static_cast<int>(c.grid.bounds.size()))
    throw ConfigError("grid.bounds: dimension does not match the dataset");
}

int worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MFG_EVOCLUST_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = n > 0 ? std::min(n, cap) : cap;
  }
  return std::max(1, n);
}

namespace {

template <class Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(count, worker_threads());
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i; (i = next++) < count;) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// First center drawn with probability proportional to f, the rest by farthest-point over the support.
std::vector<Vec> seed_centers(const DensityField& f, int count, std::uint64_t seed) {
  const SpatialGrid& g = *f.grid;
  std::mt19937_64 rng(seed);
  double total = 0.0;
  double peak = 0.0;
  for (double v : f.values) {
    total += v;
    peak = std::max(peak, v);
  }
  if (!(total > 0.0)) throw NumericalError("initialization: data frame has no mass");
  const double u = unit_uniform(rng) * total;
  std::size_t first = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (f.values[i] <= 0.0) continue;
    first = i;
    acc += f.values[i];
    if (acc > u) break;
  }
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (f.values[i] > 1e-12 * peak) support.push_back(i);

  std::vector<Vec> centers{g.barycenter(first)};
  std::vector<double> gap(support.size());
  for (std::size_t s = 0; s < support.size(); ++s) gap[s] = (g.barycenter(support[s]) - centers[0]).squaredNorm();
  while (static_cast<int>(centers.size()) < count) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < support.size(); ++s)
      if (gap[s] > gap[best]) best = s;
    centers.push_back(g.barycenter(support[best]));
    for (std::size_t s = 0; s < support.size(); ++s)
      gap[s] = std::min(gap[s], (g.barycenter(support[s]) - centers.back()).squaredNorm());
  }
  return centers;
}

Initialization static_attempt(const DensityField& f0, int count, std::uint64_t seed, const EStepOptions& options,
                              int max_iterations, double tol) {
  const GridPtr& grid = f0.grid;
  const double floor = options.cov_floor > 0.0 ? options.cov_floor : default_cov_floor(*grid);
  const GridMoments data = grid_moments(f0);
  const Mat start_cov = clamp_eigenvalues(data.cov / (static_cast<double>(count) * count), floor);

  Initialization out;
  out.seed = seed;
  for (const Vec& c : seed_centers(f0, count, seed))
    out.components.push_back(grid_gaussian(GaussianMoments{c, start_cov, f0.time}, grid));
  std::vector<double> alpha(static_cast<std::size_t>(count), 1.0 / count);
  const EStepStats* previous = nullptr;
  for (int it = 1; it <= max_iterations; ++it) {
    EStepStats stats = estep(alpha, out.components, f0, options, previous);
    double change = 0.0;
    for (int k = 0; k < count; ++k) {
      const ComponentStats& c = stats.components[k];
      change = std::max(change, std::abs(c.alpha - alpha[k]));
      alpha[k] = c.alpha;
      if (!c.frozen) out.components[k] = grid_gaussian(GaussianMoments{c.mean, c.cov, f0.time}, grid);
    }
    out.stats = std::move(stats);
    out.iterations = it;
    previous = &out.stats;
    if (change < tol) break;
  }
  return out;
}

}  // namespace

Initialization static_init(const DensityField& f0, int components, std::uint64_t seed, const EStepOptions& options,
                           int max_iterations, double tol) {
  if (components < 1) throw ConfigError("components: must be at least 1");
  for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
    Initialization init = static_attempt(f0, components, seed + attempt, options, max_iterations, tol);
    const auto alphas = init.stats.alphas();
    if (std::all_of(alphas.begin(), alphas.end(), [&](double a) { return a >= options.alpha_floor; })) return init;
  }
  throw NumericalError("initialization: degenerate mixture (a component weight fell below the floor after reseeding)");
}

DensityField mixture_density(std::span<const double> weights, std::span<const DensityField> components) {
  DensityField out(components.front().grid, components.front().time);
  for (std::size_t k = 0; k < components.size(); ++k)
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += weights[k] * components[k].values[i];
  return out;
}

namespace {

struct Context {
  const RunConfig& config;
  GridPtr grid;
  DataDensity data;
  TimeGrid time_grid;
  TemporalKernel kernel;
  DriftOptions drift;

  explicit Context(const RunConfig& c)
      : config(c),
        grid(c.grid.build()),
        data(c.dataset.load()),
        time_grid(build_time_grid(c.final_time, c.dt,
                                  c.model == Model::asym_averaged || c.model == Model::sym_averaged ? c.tau : 0.0)),
        kernel(discretize_kernel(kernel_for(c), c.tau, c.dt)) {
    if (data.kind() == DataKind::gridded) require_same_grid(*grid, *data.sequence().grid, "dataset");
    drift.epsilon = c.epsilon;
    drift.dt = c.dt;
    drift.v_floor = c.solver.v_floor;
    drift.derivative = c.solver.derivative;
  }

  DensityField sample(int n) const { return sample_to_grid(data, grid, time_grid.time(n)); }

  Trajectory empty_trajectory() const {
    Trajectory t;
    t.model = config.model;
    t.dt = time_grid.dt();
    t.steps = time_grid.steps();
    return t;
  }
};

void record(Trajectory& tr, int n, std::span<const DensityField> comps, std::span<const double> weights,
            const DensityField& f, NodeDiagnostics diag, const FrameObserver& observer,
            const EStepStats* gaussian_params = nullptr) {
  std::vector<Vec> centers;
  std::vector<Mat> covs;
  diag.component_mass.clear();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const GridMoments gm = grid_moments(comps[k]);
    diag.component_mass.push_back(gm.mass);
    if (gaussian_params != nullptr) {
      centers.push_back(gaussian_params->components[k].mean);
      covs.push_back(gaussian_params->components[k].cov);
    } else {
      centers.push_back(gm.mean);
      covs.push_back(gm.cov);
    }
  }
  tr.centroids.push_back(std::move(centers));
  tr.component_cov.push_back(std::move(covs));
  tr.weights.emplace_back(weights.begin(), weights.end());
  tr.mixture.push_back(grid_moments(mixture_density(weights, comps)));
  tr.data.push_back(grid_moments(f));
  tr.diagnostics.push_back(std::move(diag));
  if (observer) observer(Frame{n, tr.time(n), comps, weights, &f});
}

StatsSeries past_extended(const EStepStats& initial, const TimeGrid& tg) {
  std::vector<EStepStats> items;
  for (int n = -tg.past_steps(); n <= 0; ++n) {
    items.push_back(initial);
    items.back().time = tg.time(n);
  }
  return StatsSeries(-tg.past_steps(), std::move(items));
}

// One forward sweep of the EM-PDE loop. With `driving`, the drift and mixture weights come from that
// fixed smoothed series (symmetric fixed-point pass); otherwise they are built on the fly, smoothed with
// `kernel` when it is not the dirac kernel.
// With `lookahead`, the smoother sees this sweep's statistics up to the current node and the
// lookahead series beyond it; each new node overwrites its lookahead entry.
Trajectory march(const Context& ctx, const Initialization& init, const StatsSeries* driving,
                 const TemporalKernel& kernel, const FrameObserver& observer, StatsSeries* lookahead = nullptr) {
  const RunConfig& cfg = ctx.config;
  const TimeGrid& tg = ctx.time_grid;
  const bool averaged = kernel.kind != KernelKind::dirac;
  const EStepOptions& eopts = cfg.solver.estep;

  Trajectory tr = ctx.empty_trajectory();
  tr.raw = past_extended(init.stats, tg);
  EStepStats first = driving     ? driving->at(0)
                     : lookahead ? smooth_at(*lookahead, 0, kernel, eopts.alpha_floor)
                     : averaged  ? smooth_at(tr.raw, 0, kernel, eopts.alpha_floor)
                                 : init.stats;
  tr.smoothed = StatsSeries(0, {first});

  std::vector<DensityField> comps = init.components;
  std::vector<double> weights = first.alphas();
  DensityField f_prev = ctx.sample(0);
  record(tr, 0, comps, weights, f_prev, {}, observer);

  const int count = cfg.components;
  for (int n = 1; n <= tg.steps(); ++n) {
    EStepStats stats = estep(weights, comps, f_prev, eopts, &tr.raw.at(n - 1));
    stats.time = tg.time(n);
    tr.raw.push_back(stats);
    if (lookahead) lookahead->at(n) = stats;
    EStepStats sm = driving    ? driving->at(n)
                    : lookahead ? smooth_at(*lookahead, n, kernel, eopts.alpha_floor)
                    : averaged ? smooth_at(tr.raw, n, kernel, eopts.alpha_floor)
                               : std::move(stats);
    sm.time = tg.time(n);
    weights = sm.alphas();
    tr.smoothed.push_back(std::move(sm));

    const DriftSpec drift = build_drift(driving ? *driving : tr.smoothed, n, ctx.drift);
    std::vector<Advance> moved(static_cast<std::size_t>(count));
    try {
      parallel_for(count, [&](int k) {
        moved[k] = advance(comps[k], drift.components[k], cfg.epsilon, tg.dt(), cfg.solver.fp);
      });
    } catch (const CflError& e) {
      throw CflError(std::string(e.what()) + " at step " + std::to_string(n) + " (t = " +
                         std::to_string(tg.time(n)) + ")",
                     e.cfl(), n);
    }
    NodeDiagnostics diag;
    for (int k = 0; k < count; ++k) {
      comps[k] = std::move(moved[k].density);
      comps[k].time = tg.time(n);
      diag.max_cfl = std::max(diag.max_cfl, moved[k].cfl);
      diag.substeps = std::max(diag.substeps, moved[k].substeps);
    }
    f_prev = ctx.sample(n);
    record(tr, n, comps, weights, f_prev, std::move(diag), observer);
  }
  return tr;
}

Initialization initialize(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  try {
    return static_init(ctx.sample(0), cfg.components, cfg.seed, cfg.solver.estep);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " at t = 0");
  }
}

// splitmix64 finalizer; gives each frame its own fixed seed.
std::uint64_t frame_seed(std::uint64_t seed, int n) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(n) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Trajectory run_static(const Context& ctx, const FrameObserver& observer) {
  const RunConfig& cfg = ctx.config;
  const TimeGrid& tg = ctx.time_grid;
  Trajectory tr = ctx.empty_trajectory();
  tr.raw = StatsSeries(0, {});
  tr.smoothed = StatsSeries(0, {});
  for (int n = 0; n <= tg.steps(); ++n) {
    const DensityField f = ctx.sample(n);
    Initialization init;
    try {
      init = static_init(f, cfg.components, frame_seed(cfg.seed, n), cfg.solver.estep);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at step " + std::to_string(n));
    }
    init.stats.time = tg.time(n);
    const std::vector<double> weights = init.stats.alphas();
    tr.raw.push_back(init.stats);
    tr.smoothed.push_back(init.stats);
    record(tr, n, init.components, weights, f, {}, observer, &init.stats);
  }
  return tr;
}

StatsSeries blend(const StatsSeries& computed, const StatsSeries& old, double theta, double alpha_floor) {
  StatsSeries out = old;
  for (int n = std::max(1, old.first()); n <= old.last(); ++n) {
    EStepStats& o = out.at(n);
    const EStepStats& c = computed.at(n);
    for (std::size_t k = 0; k < o.components.size(); ++k) {
      ComponentStats& ok = o.components[k];
      const ComponentStats& ck = c.components[k];
      ok.alpha = theta * ck.alpha + (1.0 - theta) * ok.alpha;
      ok.mean = theta * ck.mean + (1.0 - theta) * ok.mean;
      ok.cov = symmetrize(theta * ck.cov + (1.0 - theta) * ok.cov);
      ok.frozen = ok.alpha < alpha_floor;
    }
  }
  return out;
}

// Flattens alpha, mean and the upper covariance triangle of nodes 1..last into one vector.
std::vector<double> pack(const StatsSeries& s) {
  std::vector<double> out;
  for (int n = std::max(1, s.first()); n <= s.last(); ++n)
    for (const ComponentStats& c : s.at(n).components) {
      out.push_back(c.alpha);
      for (Eigen::Index a = 0; a < c.mean.size(); ++a) out.push_back(c.mean(a));
      for (Eigen::Index a = 0; a < c.cov.rows(); ++a)
        for (Eigen::Index b = a; b < c.cov.cols(); ++b) out.push_back(c.cov(a, b));
    }
  return out;
}

// Inverse of pack, projected back onto admissible statistics: weights on the simplex and
// covariances above the eigenvalue floor.
StatsSeries unpack(const std::vector<double>& x, const StatsSeries& shape, double alpha_floor, double cov_floor) {
  StatsSeries out = shape;
  std::size_t p = 0;
  for (int n = std::max(1, out.first()); n <= out.last(); ++n) {
    auto& comps = out.at(n).components;
    double total = 0.0;
    for (ComponentStats& c : comps) {
      c.alpha = std::max(0.0, x[p++]);
      total += c.alpha;
      for (Eigen::Index a = 0; a < c.mean.size(); ++a) c.mean(a) = x[p++];
      for (Eigen::Index a = 0; a < c.cov.rows(); ++a)
        for (Eigen::Index b = a; b < c.cov.cols(); ++b) c.cov(a, b) = c.cov(b, a) = x[p++];
      c.cov = clamp_eigenvalues(c.cov, cov_floor);
    }
    for (ComponentStats& c : comps) {
      c.alpha = total > 0.0 ? c.alpha / total : 1.0 / static_cast<double>(comps.size());
      c.frozen = c.alpha < alpha_floor;
    }
  }
  return out;
}

// Type-II Anderson mixing over the last `depth` iterates.
class Anderson {
 public:
  explicit Anderson(int depth) : depth_(depth) {}

  std::vector<double> next(const std::vector<double>& x, const std::vector<double>& fx, double theta) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = fx[i] - x[i];
    if (!x_prev_.empty()) {
      std::vector<double> dx(x.size()), dg(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        dx[i] = x[i] - x_prev_[i];
        dg[i] = g[i] - g_prev_[i];
      }
      dx_.push_back(std::move(dx));
      dg_.push_back(std::move(dg));
      if (static_cast<int>(dx_.size()) > depth_) {
        dx_.pop_front();
        dg_.pop_front();
      }
    }
    x_prev_ = x;
    g_prev_ = g;
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + theta * g[i];
    if (dx_.empty()) return out;
    const Eigen::Index rows = static_cast<Eigen::Index>(x.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(dg_.size());
    Eigen::MatrixXd dgm(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) dgm.col(j) = Eigen::Map<const Eigen::VectorXd>(dg_[j].data(), rows);
    const Eigen::VectorXd gamma =
        dgm.colPivHouseholderQr().solve(Eigen::Map<const Eigen::VectorXd>(g.data(), rows));
    for (Eigen::Index j = 0; j < cols; ++j)
      for (std::size_t i = 0; i < x.size(); ++i) out[i] -= gamma(j) * (dx_[j][i] + theta * dg_[j][i]);
    return out;
  }

  void reset() {
    dx_.clear();
    dg_.clear();
    x_prev_.clear();
    g_prev_.clear();
  }

 private:
  int depth_;
  std::deque<std::vector<double>> dx_;
  std::deque<std::vector<double>> dg_;
  std::vector<double> x_prev_;
  std::vector<double> g_prev_;
};

double alpha_residual(const StatsSeries& a, const StatsSeries& b) {
  double r = 0.0;
  for (int n = std::max(a.first(), b.first()); n <= std::min(a.last(), b.last()); ++n)
    for (std::size_t k = 0; k < a.at(n).components.size(); ++k)
      r = std::max(r, std::abs(a.at(n).components[k].alpha - b.at(n).components[k].alpha));
  return r;
}

}  // namespace

Trajectory run_sequential(const RunConfig& config, const FrameObserver& observer) {
  validate(config);
  if (config.model == Model::sym_averaged) throw ConfigError("model: sym_averaged needs the fixed-point driver");
  const Context ctx(config);
  if (config.model == Model::static_frames) return run_static(ctx, observer);
  return march(ctx, initialize(ctx), nullptr, ctx.kernel, observer);
}

Trajectory run_fixed_point(const RunConfig& config, const FrameObserver& observer) {
  validate(config);
  if (config.model != Model::sym_averaged) throw ConfigError("model: fixed-point driver needs sym_averaged");
  const Context ctx(config);
  const TimeGrid& tg = ctx.time_grid;
  const EStepOptions& eopts = config.solver.estep;
  const FixedPointOptions& fp = config.fixed_point;
  const Initialization init = initialize(ctx);

  // Initial iterate: the statistics of the sequential instantaneous sweep.
  const TemporalKernel dirac = discretize_kernel(KernelKind::dirac, config.tau, config.dt);
  StatsSeries iterate = march(ctx, init, nullptr, dirac, {}).raw;

  std::vector<double> residuals;
  std::vector<double> damping;
  double theta = fp.damping;
  const double cov_floor = eopts.cov_floor > 0.0 ? eopts.cov_floor : default_cov_floor(*ctx.grid);
  Anderson anderson(fp.anderson_depth);
  bool converged = false;
  Trajectory last;
  StatsSeries driving;
  for (int i = 0; i < fp.max_iterations; ++i) {
    if (fp.gauss_seidel) {
      StatsSeries work = iterate;
      last = march(ctx, init, nullptr, ctx.kernel, {}, &work);
      driving = last.smoothed;
    } else {
      driving = smooth_series(iterate, ctx.kernel, 0, tg.steps(), eopts.alpha_floor);
      last = march(ctx, init, &driving, ctx.kernel, {});
    }
    const double r = alpha_residual(last.raw, iterate);
    residuals.push_back(r);
    damping.push_back(theta);
    if (r < fp.tol) {
      converged = true;
      break;
    }
    if (fp.auto_damping && i >= 3 && r > residuals[residuals.size() - 2]) {
      theta *= 0.5;
      anderson.reset();
    }
    if (fp.anderson_depth > 0)
      iterate = unpack(anderson.next(pack(iterate), pack(last.raw), theta), iterate, eopts.alpha_floor, cov_floor);
    else
      iterate = blend(last.raw, iterate, theta, eopts.alpha_floor);
  }
  // The sweep is deterministic, so replaying it for the observer reproduces `last` exactly.
  if (observer) last = march(ctx, init, &driving, ctx.kernel, observer);
  last.residuals = std::move(residuals);
  last.damping = std::move(damping);
  last.converged = converged;
  last.iterations = static_cast<int>(last.residuals.size());
  return last;
}

Trajectory run(const RunConfig& config, const FrameObserver& observer) {
  return config.model == Model::sym_averaged ? run_fixed_point(config, observer) : run_sequential(config, observer);
}

}  // namespace evoclust
