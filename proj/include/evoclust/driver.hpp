#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evoclust/datasets.hpp"
#include "evoclust/drift.hpp"
#include "evoclust/estep.hpp"
#include "evoclust/fp_solver.hpp"
#include "evoclust/gaussian_oracle.hpp"
#include "evoclust/kernels.hpp"

namespace evoclust {

enum class Model { static_frames, instantaneous, asym_averaged, sym_averaged };

const char* model_name(Model m);
Model parse_model(const std::string& name);

/// Bounds per axis plus either explicit node counts or a target spacing.
struct GridSpec {
  std::vector<Interval> bounds{{0.0, 1.0}};
  std::vector<int> nodes;
  double spacing = 0.01;

  GridPtr build() const;
};

struct DatasetSpec {
  DataKind kind = DataKind::test1;
  Test1Params test1;
  Test2Params test2 = Test2Params::with_default_radii();
  std::string csv;
  std::string sidecar;

  DataDensity load() const;
};

struct SolverOptions {
  FpOptions fp{1.0, 1e-10, 4096, true};
  EStepOptions estep;
  /// <= 0 selects 1e-6 / dt.
  double v_floor = 0.0;
  DerivativeScheme derivative = DerivativeScheme::backward;
};

struct FixedPointOptions {
  double tol = 1e-6;
  int max_iterations = 50;
  double damping = 1.0;
  /// Halve the damping whenever the residual grows after the third iteration.
  bool auto_damping = true;
  /// History depth for Anderson mixing of the statistics series; 0 gives plain damped Picard.
  int anderson_depth = 0;
  /// Smooth with the current sweep's statistics behind the front and the previous iterate ahead of it.
  bool gauss_seidel = false;
};

struct RunConfig {
  Model model = Model::instantaneous;
  int components = 3;
  double final_time = 4.5;
  double dt = 1e-3;
  double epsilon = 1.0;
  double tau = 0.5;
  GridSpec grid;
  DatasetSpec dataset;
  SolverOptions solver;
  FixedPointOptions fixed_point;
  std::uint64_t seed = 0;
  /// Replaces the model's own kernel (averaged models only).
  std::optional<KernelKind> kernel;
};

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& config);

KernelKind kernel_for(const RunConfig& c);

struct Initialization {
  std::vector<DensityField> components;
  EStepStats stats;
  int iterations = 0;
  std::uint64_t seed = 0;
};

/// Static soft clustering of one frame: seeded centers, then
/// responsibilities -> statistics -> gridded Gaussians until max |delta alpha| < tol.
/// Reseeds once with seed + 1 when a weight ends below the floor, then throws NumericalError.
Initialization static_init(const DensityField& f0, int components, std::uint64_t seed,
                           const EStepOptions& options = {}, int max_iterations = 500, double tol = 1e-8);

/// sum_k w_k m_k
DensityField mixture_density(std::span<const double> weights, std::span<const DensityField> components);

/// State handed to observers at every time node.
struct Frame {
  int index = 0;
  double time = 0.0;
  std::span<const DensityField> components;
  std::span<const double> weights;
  const DensityField* data = nullptr;
};

using FrameObserver = std::function<void(const Frame&)>;

struct NodeDiagnostics {
  /// Largest per-component CFL number of the step that produced this node.
  double max_cfl = 0.0;
  int substeps = 0;
  std::vector<double> component_mass;
};

struct Trajectory {
  Model model = Model::instantaneous;
  double dt = 0.0;
  int steps = 0;
  /// E-step statistics; indices below 0 hold the initial statistics (past extension).
  StatsSeries raw;
  /// Statistics that drive the drift and supply the mixture weights (smoothed for averaged models).
  StatsSeries smoothed;
  std::vector<std::vector<double>> weights;
  /// Grid mean and covariance of every component density (the Gaussian parameters for the static model).
  std::vector<std::vector<Vec>> centroids;
  std::vector<std::vector<Mat>> component_cov;
  std::vector<GridMoments> mixture;
  std::vector<GridMoments> data;
  std::vector<NodeDiagnostics> diagnostics;
  std::vector<double> residuals;
  std::vector<double> damping;
  bool converged = true;
  int iterations = 0;

  double time(int n) const { return n * dt; }
};

Trajectory run_sequential(const RunConfig& config, const FrameObserver& observer = {});
Trajectory run_fixed_point(const RunConfig& config, const FrameObserver& observer = {});
/// Dispatches on config.model.
Trajectory run(const RunConfig& config, const FrameObserver& observer = {});

/// Worker count for per-component loops: MFG_EVOCLUST_THREADS when set, else the hardware count.
int worker_threads();

}  // namespace evoclust
