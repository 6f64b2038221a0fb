#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evoclust/density.hpp"
#include "evoclust/drift.hpp"

namespace evoclust {

/// Conservative semi-Lagrangian transfer: source node j sends weight[e] of its value to target[e]
/// for e in [offset[j], offset[j+1]).
struct EvolutionOperator {
  GridPtr grid;
  double dt = 0.0;
  double cfl = 0.0;
  std::vector<std::size_t> offset;
  std::vector<std::uint32_t> target;
  std::vector<double> weight;

  double column_sum(std::size_t j) const;
};

struct FpOptions {
  /// Largest admissible dt * |B| / (cell edge).
  double cfl_max = 1.0;
  /// Nodes with m_i <= support_cutoff * max m are left out of the CFL maximum when a density is
  /// supplied; 0 keeps every node.
  double support_cutoff = 0.0;
  /// Substep cap for advance().
  int max_substeps = 4096;
  /// Solve the displacement per source so the deposited covariance, interpolation spread included,
  /// is exactly 2 eps dt I. Off: fixed displacement sqrt(2 d eps dt).
  bool moment_matched = true;
};

/// dt * max_i |B(x_i)| / min cell edge, over every node or over the support of `m`.
double cfl_number(const ComponentDrift& b, double dt, const SpatialGrid& grid, const DensityField* m = nullptr,
                  double support_cutoff = 0.0);

/// Each source x_j is moved to x_j - dt B(x_j), split into 2d points displaced by +-r_a along
/// each axis a, and every point deposits 1/(2d) by multilinear interpolation. Points outside the
/// grid are clipped to the boundary cell centers.
/// Throws CflError when the CFL number exceeds cfl_max or the diffusion displacement exceeds
/// a quarter of the domain.
EvolutionOperator assemble_operator(const ComponentDrift& b, double eps, double dt, const GridPtr& grid,
                                    const FpOptions& options = {}, const DensityField* support = nullptr);

DensityField step(const DensityField& m, const EvolutionOperator& a);

/// m^0 .. m^N for drifts[n - 1] applied on step n. No renormalization; CFL errors carry the step index.
std::vector<DensityField> evolve(const DensityField& m0, std::span<const ComponentDrift> drifts, double eps,
                                 const TimeGrid& time_grid, const FpOptions& options = {});

struct Advance {
  DensityField density;
  int substeps = 1;
  double cfl = 0.0;
};

/// One step of length dt split into ceil(cfl / cfl_max) equal substeps with the same drift,
/// the CFL number measured on the support of m.
Advance advance(const DensityField& m, const ComponentDrift& b, double eps, double dt, const FpOptions& options);

}  // namespace evoclust
