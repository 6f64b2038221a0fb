#include "evoclust/linalg.hpp"

#include <algorithm>

namespace evoclust {

double min_eigenvalue(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(symmetrize(a), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

Mat clamp_eigenvalues(const Mat& a, double floor) {
  const Mat s = symmetrize(a);
  Eigen::SelfAdjointEigenSolver<Mat> eig(s);
  Vec lambda = eig.eigenvalues();
  if (lambda.minCoeff() >= floor) return s;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda(i) = std::max(lambda(i), floor);
  const Mat& q = eig.eigenvectors();
  return symmetrize(q * lambda.asDiagonal() * q.transpose());
}

bool is_spd(const Mat& a) {
  if (!a.allFinite()) return false;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) return false;
  return min_eigenvalue(a) > 0.0;
}

double frobenius(const Mat& a) { return a.norm(); }

}  // namespace evoclust
