#pragma once

#include <Eigen/Dense>

namespace evoclust {

// Spatial dimension is 1 or 2, so every vector/matrix fits a 2x2 inline buffer.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;

inline Vec zero_vec(int d) { return Vec::Zero(d); }
inline Mat zero_mat(int d) { return Mat::Zero(d, d); }
inline Mat identity(int d) { return Mat::Identity(d, d); }

inline Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

double min_eigenvalue(const Mat& a);

/// Symmetrizes `a` and raises every eigenvalue below `floor` to `floor`.
Mat clamp_eigenvalues(const Mat& a, double floor);

bool is_spd(const Mat& a);

double frobenius(const Mat& a);

}  // namespace evoclust
