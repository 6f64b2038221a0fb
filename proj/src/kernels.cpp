#include "evoclust/kernels.hpp"

#include <cmath>
#include <functional>

#include "evoclust/errors.hpp"

namespace evoclust {

double asym_kernel(double s, double tau) {
  if (s < 0.0 || s >= tau) return 0.0;
  return (std::exp(-s) - std::exp(-tau)) / (1.0 - std::exp(-tau) * (1.0 + tau));
}

namespace {

double mollifier(double s) {
  const double q = 1.0 - s * s;
  return q <= 0.0 ? 0.0 : std::exp(-1.0 / q);
}

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m,
               double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, fa, b, fb, m, fm, whole, tol, 50);
}

}  // namespace

double mollifier_constant() {
  // Split at 0 so the first Simpson panel does not sample the peak only.
  static const double c = adaptive_simpson(mollifier, -1.0, 0.0, 1e-15) + adaptive_simpson(mollifier, 0.0, 1.0, 1e-15);
  return c;
}

double sym_kernel(double s, double tau) {
  const double half = 0.5 * tau;
  if (s <= -half || s >= half) return 0.0;
  const double r = 2.0 * s / tau;
  return 2.0 / (tau * mollifier_constant()) * std::exp(-1.0 / (1.0 - r * r));
}

namespace {

// Number of whole steps in `span`, tolerant of decimal round-off (0.5 / 0.001 -> 500).
int whole_steps(double span, double dt) {
  const double q = span / dt;
  const double r = std::round(q);
  return std::abs(q - r) < 1e-9 * std::max(1.0, r) ? static_cast<int>(r) : static_cast<int>(std::floor(q));
}

}  // namespace

TemporalKernel discretize_kernel(KernelKind kind, double tau, double dt) {
  if (!(dt > 0.0)) throw ConfigError("kernel: dt must be positive");
  TemporalKernel g;
  g.kind = kind;
  g.tau = tau;
  g.dt = dt;
  if (kind == KernelKind::dirac) {
    g.weights = {1.0 / dt};
    return g;
  }
  if (tau < dt * (1.0 - 1e-12)) throw ConfigError("kernel: tau must be at least one time step");
  std::function<double(double)> eval;
  if (kind == KernelKind::asymmetric) {
    g.first_offset = 0;
    g.last_offset = whole_steps(tau, dt);
    eval = [tau](double s) { return asym_kernel(s, tau); };
  } else {
    const int half = whole_steps(0.5 * tau, dt);
    g.first_offset = -half;
    g.last_offset = half;
    eval = [tau](double s) { return sym_kernel(s, tau); };
  }
  double sum = 0.0;
  for (int j = g.first_offset; j <= g.last_offset; ++j) {
    const double w = eval(j * dt);
    g.weights.push_back(w);
    sum += w * dt;
  }
  if (!(sum > 0.0)) throw ConfigError("kernel: window too narrow for the time step");
  g.raw_sum = sum;
  for (double& w : g.weights) w /= sum;
  return g;
}

EStepStats smooth_at(const StatsSeries& series, int n, const TemporalKernel& g, double alpha_floor) {
  const EStepStats& here = series.at(n);
  if (g.kind == KernelKind::dirac) return here;
  const int k_count = here.size();
  const int d = static_cast<int>(here.components.front().mean.size());

  std::vector<double> a_sum(k_count, 0.0);
  std::vector<Vec> m_sum(k_count, zero_vec(d));
  std::vector<Mat> c_sum(k_count, zero_mat(d));
  double used = 0.0;
  for (int j = g.first_offset; j <= g.last_offset; ++j) {
    const double w = g.weight(j) * g.dt;
    if (w == 0.0) continue;
    const int src = n - j;
    if (src > series.last()) continue;
    if (src < series.first())
      throw Error("smoothing: window at node " + std::to_string(n) + " needs node " + std::to_string(src) +
                  " before the stored history (insufficient history)");
    used += w;
    const EStepStats& s = series.at(src);
    for (int k = 0; k < k_count; ++k) {
      const ComponentStats& c = s.components[k];
      a_sum[k] += w * c.alpha;
      m_sum[k] += (w * c.alpha) * c.mean;
      c_sum[k] += (w * c.alpha) * c.cov;
    }
  }
  EStepStats out;
  out.time = here.time;
  out.components.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    ComponentStats& c = out.components[k];
    c.alpha = a_sum[k] / used;
    if (a_sum[k] > 0.0) {
      c.mean = m_sum[k] / a_sum[k];
      c.cov = symmetrize(c_sum[k] / a_sum[k]);
    } else {
      c.mean = here.components[k].mean;
      c.cov = here.components[k].cov;
    }
    c.frozen = c.alpha < alpha_floor;
  }
  return out;
}

StatsSeries smooth_series(const StatsSeries& series, const TemporalKernel& g, int first, int last,
                          double alpha_floor) {
  StatsSeries out(first, {});
  for (int n = first; n <= last; ++n) out.push_back(smooth_at(series, n, g, alpha_floor));
  return out;
}

std::vector<Mat> centroid_variability(const StatsSeries& series, int n, const TemporalKernel& g,
                                      const EStepStats& smoothed) {
  const int k_count = smoothed.size();
  const int d = static_cast<int>(smoothed.components.front().mean.size());
  std::vector<Mat> num(k_count, zero_mat(d));
  std::vector<double> den(k_count, 0.0);
  for (int j = g.first_offset; j <= g.last_offset; ++j) {
    const double w = g.weight(j) * g.dt;
    const int src = n - j;
    if (w == 0.0 || !series.contains(src)) continue;
    const EStepStats& s = series.at(src);
    for (int k = 0; k < k_count; ++k) {
      const Vec dev = s.components[k].mean - smoothed.components[k].mean;
      num[k] += (w * s.components[k].alpha) * (dev * dev.transpose());
      den[k] += w * s.components[k].alpha;
    }
  }
  for (int k = 0; k < k_count; ++k)
    if (den[k] > 0.0) num[k] /= den[k];
  return num;
}

}  // namespace evoclust
