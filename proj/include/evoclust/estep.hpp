#pragma once

#include <span>
#include <vector>

#include "evoclust/density.hpp"

namespace evoclust {

/// gamma_k(x_i) for every component k and node i, stored component-major.
struct ResponsibilityField {
  GridPtr grid;
  int components = 0;
  std::vector<double> gamma;
  double time = 0.0;

  double operator()(int k, std::size_t i) const { return gamma[static_cast<std::size_t>(k) * grid->size() + i]; }
};

struct ComponentStats {
  double alpha = 0.0;
  Vec mean;
  Mat cov;
  /// alpha fell below the empty-cluster threshold; drift is switched off for this component.
  bool frozen = false;
};

/// Weight, mean and covariance per component at one time. Also used for the kernel-smoothed statistics.
struct EStepStats {
  double time = 0.0;
  std::vector<ComponentStats> components;

  int size() const { return static_cast<int>(components.size()); }
  std::vector<double> alphas() const;
};

struct EStepOptions {
  double alpha_floor = 1e-8;
  /// Eigenvalue floor for the covariances; <= 0 selects 1e-6 * (max grid extent)^2.
  double cov_floor = 0.0;
};

double default_cov_floor(const SpatialGrid& grid);

/// Bayes ratio alpha_k m_k / sum_j alpha_j m_j. Nodes where the denominator is below 1e-30
/// get the uniform value 1/K.
ResponsibilityField responsibilities(std::span<const double> weights, std::span<const DensityField> components);

/// First-order quadrature of alpha_k, mu_k, Sigma_k against the data field f.
/// Components whose alpha drops below the floor are flagged frozen and keep the mean/covariance of
/// `previous` when given.
EStepStats estep_stats(const ResponsibilityField& gamma, const DensityField& f, const EStepOptions& options = {},
                       const EStepStats* previous = nullptr);

/// Responsibilities followed by the statistics, in one pass.
EStepStats estep(std::span<const double> weights, std::span<const DensityField> components, const DensityField& f,
                 const EStepOptions& options = {}, const EStepStats* previous = nullptr);

}  // namespace evoclust

namespace evoclust {

/// E-step statistics indexed by time node n; the index range may start below zero
/// (past extension with the t = 0 statistics).
class StatsSeries {
 public:
  StatsSeries() = default;
  StatsSeries(int first, std::vector<EStepStats> items) : first_(first), items_(std::move(items)) {}

  int first() const { return first_; }
  int last() const { return first_ + static_cast<int>(items_.size()) - 1; }
  bool empty() const { return items_.empty(); }
  bool contains(int n) const { return n >= first_ && n <= last(); }
  const EStepStats& at(int n) const;
  EStepStats& at(int n);
  void push_back(EStepStats s) { items_.push_back(std::move(s)); }
  /// Drops every node after n.
  void truncate_after(int n);

 private:
  int first_ = 0;
  std::vector<EStepStats> items_;
};

}  // namespace evoclust
