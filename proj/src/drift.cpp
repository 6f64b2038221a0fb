#include "evoclust/drift.hpp"

#include "evoclust/errors.hpp"

namespace evoclust {

Mat solve_sylvester(const Mat& sigma, const Mat& rhs) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(symmetrize(sigma));
  const Mat& q = eig.eigenvectors();
  const Vec& lambda = eig.eigenvalues();
  const Mat r = q.transpose() * rhs * q;
  Mat x(r.rows(), r.cols());
  for (Eigen::Index a = 0; a < r.rows(); ++a)
    for (Eigen::Index b = 0; b < r.cols(); ++b) x(a, b) = r(a, b) / (lambda(a) + lambda(b));
  return q * x * q.transpose();
}

Mat compute_V(const Mat& sigma, const Mat& dsigma, double eps, double v_floor, double commutator_tol) {
  if (!is_spd(sigma)) throw NumericalError("compute_V: covariance is not symmetric positive definite");
  const int d = static_cast<int>(sigma.rows());
  const Mat rhs = 2.0 * eps * identity(d) - dsigma;
  const double commutator = frobenius(sigma * dsigma - dsigma * sigma);
  Mat v;
  if (commutator <= commutator_tol * frobenius(sigma) * frobenius(dsigma)) {
    v = symmetrize(0.5 * sigma.inverse() * rhs);
  } else {
    v = symmetrize(solve_sylvester(sigma, rhs));
  }
  return clamp_eigenvalues(v, v_floor);
}

Vec compute_M(const Vec& mu, const Vec& dmu, const Mat& V) { return mu + V.ldlt().solve(dmu); }

DriftSpec build_drift(const StatsSeries& series, int n, const DriftOptions& options) {
  const EStepStats& now = series.at(n);
  const double v_floor = options.effective_v_floor();
  const double dt = options.dt;

  int lo = n, hi = n;
  if (options.derivative == DerivativeScheme::centered && series.contains(n - 1) && series.contains(n + 1)) {
    lo = n - 1;
    hi = n + 1;
  } else if (series.contains(n - 1)) {
    lo = n - 1;
  }
  const double span = (hi - lo) * dt;

  DriftSpec out;
  out.time = now.time;
  out.components.resize(now.components.size());
  for (std::size_t k = 0; k < now.components.size(); ++k) {
    const ComponentStats& c = now.components[k];
    const int d = static_cast<int>(c.mean.size());
    ComponentDrift& b = out.components[k];
    if (c.frozen) {
      b.rate = v_floor * identity(d);
      b.attractor = c.mean;
      b.frozen = true;
      continue;
    }
    Vec dmu = zero_vec(d);
    Mat dsigma = zero_mat(d);
    if (hi > lo) {
      dmu = (series.at(hi).components[k].mean - series.at(lo).components[k].mean) / span;
      dsigma = symmetrize((series.at(hi).components[k].cov - series.at(lo).components[k].cov) / span);
    }
    b.rate = compute_V(c.cov, dsigma, options.epsilon, v_floor, options.commutator_tol);
    b.attractor = compute_M(c.mean, dmu, b.rate);
  }
  return out;
}

}  // namespace evoclust
