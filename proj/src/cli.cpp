#include "evoclust/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "evoclust/errors.hpp"
#include "evoclust/verification.hpp"

namespace evoclust {

namespace fs = std::filesystem;

RunResult execute(const RunFile& file) {
  RunResult result;
  result.file = file;
  const RunConfig& c = file.config;
  std::set<int> wanted;
  for (double t : file.snapshots) wanted.insert(static_cast<int>(std::lround(t / c.dt)));

  MetricCollector collector;
  FrameObserver metrics = collector.observer();
  auto observer = [&](const Frame& frame) {
    metrics(frame);
    if (!wanted.count(frame.index)) return;
    Snapshot s;
    s.index = frame.index;
    s.time = frame.time;
    s.components.assign(frame.components.begin(), frame.components.end());
    s.weights.assign(frame.weights.begin(), frame.weights.end());
    s.data = *frame.data;
    result.snapshots.push_back(std::move(s));
  };
  result.trajectory = run(c, observer);
  result.metrics = collector.finish(result.trajectory, c.dataset.load());
  return result;
}

std::vector<std::string> write_bundle(const RunResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  const std::uint64_t seed = r.file.config.seed;
  const Trajectory& tr = r.trajectory;
  std::vector<std::string> files{"summary.csv", "metrics.csv", "alphas.csv"};
  write_summary(dir / "summary.csv", tr, seed);
  write_metrics(dir / "metrics.csv", tr, r.metrics, seed);
  write_alphas(dir / "alphas.csv", tr, seed);
  if (tr.model == Model::sym_averaged) {
    write_residuals(dir / "residuals.csv", tr, seed);
    files.push_back("residuals.csv");
  }
  for (const Snapshot& s : r.snapshots) {
    const std::string name = snapshot_name(s.time);
    write_snapshot(dir / name, s, tr.model, seed);
    files.push_back(name);
  }
  write_text(dir / "run.json", to_json(r.file).dump(2));
  files.push_back("run.json");

  double drift = 0.0;
  for (double d : r.metrics.mass_drift) drift = std::max(drift, d);
  nlohmann::json report;
  report["seed"] = seed;
  report["model"] = model_name(tr.model);
  report["steps"] = tr.steps;
  report["tv_alpha"] = r.metrics.tv_alpha;
  report["tv_centroids"] = r.metrics.tv_centroids;
  report["max_mass_drift"] = drift;
  report["w1_coarsened"] = r.metrics.w1_approximate;
  report["centroid_error"] = "l1 norm summed over components after optimal matching";
  const RunConfig& c = r.file.config;
  if (tr.model == Model::asym_averaged || tr.model == Model::sym_averaged) {
    // Before tau the smoothing window reaches into the constant past extension of the data.
    report["past_extension_used_before"] = c.tau;
    if (kernel_for(c) == KernelKind::symmetric) report["window_truncated_after"] = c.final_time - c.tau / 2.0;
  }
  if (tr.model == Model::sym_averaged) {
    report["converged"] = tr.converged;
    report["iterations"] = tr.iterations;
    report["final_residual"] = tr.residuals.empty() ? 0.0 : tr.residuals.back();
  }
  write_text(dir / "report.json", report.dump(2));
  files.push_back("report.json");
  return files;
}

int cmd_run(const RunRequest& request, std::ostream& log) {
  RunFile file = load_run_file(request.config);
  if (request.seed) file.config.seed = *request.seed;
  if (request.snapshots) {
    for (double t : *request.snapshots)
      if (!(t >= 0.0) || t > file.config.final_time)
        throw ConfigError("--snapshots: times must lie in [0, final_time]");
    file.snapshots = *request.snapshots;
  }
  const auto start = std::chrono::steady_clock::now();
  const RunResult result = execute(file);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto files = write_bundle(result, request.out);

  const Trajectory& tr = result.trajectory;
  log << model_name(tr.model) << ": " << tr.steps << " steps in " << format_double(std::round(seconds * 100) / 100)
      << " s, seed " << file.config.seed << "\n";
  if (tr.model == Model::sym_averaged) {
    log << "fixed-point residuals:";
    for (double r : tr.residuals) log << ' ' << format_double(r);
    log << "\n" << (tr.converged ? "converged" : "NOT converged") << " after " << tr.iterations << " iterations\n";
  }
  log << "wrote";
  for (const auto& f : files) log << ' ' << (request.out / f).string();
  log << "\n";
  return tr.converged ? kExitOk : kExitNotConverged;
}

int cmd_oracle_check(const fs::path& config, const std::optional<fs::path>& out, std::ostream& log) {
  const OracleScenario s = load_oracle_scenario(config);
  const std::vector<OracleRow> rows = oracle_refinement(s);
  std::vector<double> mean_err, cov_err;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-12s %-8s %-14s %-14s %-14s %-14s\n", "h", "dt", "steps", "mean_rel_err",
                "cov_rel_err", "mass", "var_fp");
  log << line;
  for (const OracleRow& r : rows) {
    std::snprintf(line, sizeof line, "%-12.5g %-12.5g %-8d %-14.6e %-14.6e %-14.12f %-14.6e\n", r.spacing, r.dt, r.steps,
                  r.mean_error, r.cov_error, r.mass, r.cov_fp(0, 0));
    log << line;
    mean_err.push_back(r.mean_error);
    cov_err.push_back(r.cov_error);
  }
  log << "observed order (mean):";
  for (double o : observed_orders(mean_err)) log << ' ' << format_double(std::round(o * 1000) / 1000);
  log << "\nobserved order (cov):";
  for (double o : observed_orders(cov_err)) log << ' ' << format_double(std::round(o * 1000) / 1000);
  const double gap = epsilon_invariance_gap(s.epsilon, s.dt, s.final_time);
  log << "\neps vs 2 eps with rebuilt drifts, max moment difference: " << format_double(gap) << "\n";
  if (out) {
    fs::create_directories(*out);
    CsvWriter csv(*out / "oracle.csv");
    csv.row({"h", "dt", "steps", "mean_rel_err", "cov_rel_err", "mass"});
    for (const OracleRow& r : rows) {
      csv.cell(r.spacing).cell(r.dt).cell(r.steps).cell(r.mean_error).cell(r.cov_error).cell(r.mass);
      csv.end_row();
    }
  }
  return kExitOk;
}

namespace {

void require_compatible(const RunFile& a, const RunFile& b, const fs::path& path) {
  const RunConfig& x = a.config;
  const RunConfig& y = b.config;
  if (!(*x.grid.build() == *y.grid.build()))
    throw ConfigError("compare: " + path.string() + ": grid differs from the first run");
  if (to_json(a)["dataset"] != to_json(b)["dataset"])
    throw ConfigError("compare: " + path.string() + ": dataset differs from the first run");
  if (x.dt != y.dt || x.final_time != y.final_time)
    throw ConfigError("compare: " + path.string() + ": time grid differs from the first run");
}

}  // namespace

int cmd_compare(const std::vector<fs::path>& configs, const fs::path& out, std::optional<std::uint64_t> seed,
                std::ostream& log) {
  if (configs.size() < 2) throw ConfigError("compare: needs at least two --config files");
  std::vector<RunFile> files;
  for (const fs::path& p : configs) {
    RunFile f = load_run_file(p);
    if (seed) f.config.seed = *seed;
    f.snapshots.clear();
    if (!files.empty()) require_compatible(files.front(), f, p);
    files.push_back(std::move(f));
  }
  std::vector<RunResult> results;
  bool all_converged = true;
  for (std::size_t i = 0; i < files.size(); ++i) {
    results.push_back(execute(files[i]));
    all_converged = all_converged && results.back().trajectory.converged;
    write_bundle(results.back(), out / ("run" + std::to_string(i)));
    log << "run" << i << " (" << model_name(files[i].config.model) << ") done\n";
  }
  fs::create_directories(out);

  const Trajectory& ref = results.front().trajectory;
  const auto ref_stack = stacked_centroids(ref);
  const int max_lag = static_cast<int>(std::lround(files.front().config.tau / ref.dt));
  const int d = ref.centroids.front().front().size();

  CsvWriter series(out / "compare_series.csv");
  std::vector<std::string> header{"run", "seed", "model", "step", "time", "component", "alpha"};
  for (int a = 0; a < d; ++a) header.push_back(a == 0 ? "mean_x" : "mean_y");
  header.insert(header.end(), {"w1", "centroid_gap_to_run0"});
  series.row(header);
  CsvWriter summary(out / "compare_summary.csv");
  summary.row({"run", "seed", "model", "tv_alpha", "tv_centroids", "mean_w1", "max_centroid_gap_to_run0",
               "lag_steps_vs_run0", "converged"});
  for (std::size_t i = 0; i < results.size(); ++i) {
    const Trajectory& tr = results[i].trajectory;
    const MetricSeries& m = results[i].metrics;
    const std::uint64_t s = files[i].config.seed;
    double max_gap = 0.0;
    for (std::size_t n = 0; n < tr.centroids.size(); ++n) {
      const double gap = centroid_error(tr.centroids[n], ref.centroids[n]);
      max_gap = std::max(max_gap, gap);
      for (std::size_t k = 0; k < tr.centroids[n].size(); ++k) {
        series.cell(static_cast<int>(i)).cell(s).cell(model_name(tr.model)).cell(static_cast<int>(n));
        series.cell(tr.time(static_cast<int>(n))).cell(static_cast<int>(k)).cell(tr.weights[n][k]);
        for (int a = 0; a < d; ++a) series.cell(tr.centroids[n][k](a));
        series.cell(m.w1[n]).cell(gap);
        series.end_row();
      }
    }
    double mean_w1 = 0.0;
    for (double w : m.w1) mean_w1 += w / static_cast<double>(m.w1.size());
    const int lag = alignment_lag(stacked_centroids(tr), ref_stack, max_lag);
    summary.cell(static_cast<int>(i)).cell(s).cell(model_name(tr.model)).cell(m.tv_alpha).cell(m.tv_centroids);
    summary.cell(mean_w1).cell(max_gap).cell(lag).cell(tr.converged ? "true" : "false");
    summary.end_row();
  }
  log << "wrote " << (out / "compare_series.csv").string() << " " << (out / "compare_summary.csv").string() << "\n";
  return all_converged ? kExitOk : kExitNotConverged;
}

int report_failure(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace evoclust
