#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "evoclust/drift.hpp"
#include "evoclust/errors.hpp"
#include "evoclust/gaussian_oracle.hpp"

using namespace evoclust;

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

Mat random_spd(std::mt19937_64& rng, int d, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(rng);
  return scale * (a * a.transpose() + 0.2 * identity(d));
}

// Dense solve of the vectorized equation S X + X S = R.
Mat kronecker_solve(const Mat& s, const Mat& r) {
  const int d = static_cast<int>(s.rows());
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        big(i + j * d, k + j * d) += s(i, k);
        big(i + j * d, i + k * d) += s(k, j);
      }
  Eigen::VectorXd rhs(d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) rhs(i + j * d) = r(i, j);
  const Eigen::VectorXd x = big.partialPivLu().solve(rhs);
  Mat out(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) out(i, j) = x(i + j * d);
  return out;
}

EStepStats stats1(double alpha, double mean, double var, bool frozen = false) {
  EStepStats s;
  ComponentStats c;
  c.alpha = alpha;
  c.mean = Vec::Constant(1, mean);
  c.cov = Mat::Constant(1, 1, var);
  c.frozen = frozen;
  s.components.push_back(c);
  return s;
}

}  // namespace

TEST_CASE("backward differences") {
  const double dt = 0.1;
  std::vector<double> constant(5, 2.0);
  CHECK(backward_diff<double>(constant, 3, dt) == 0.0);
  std::vector<double> ramp, square;
  for (int n = 0; n <= 10; ++n) {
    ramp.push_back(n * dt);
    square.push_back(n * dt * n * dt);
  }
  CHECK(backward_diff<double>(ramp, 4, dt) == doctest::Approx(1.0));
  CHECK(backward_diff<double>(ramp, 0, dt) == 0.0);
  CHECK(backward_diff<double>(square, 10, dt) == doctest::Approx(1.9));
}

TEST_CASE("rate matrix closed forms") {
  const Mat sigma = mat2(0.04, 0.01, 0.01, 0.02);
  const Mat v = compute_V(sigma, zero_mat(2), 0.7, 0.0);
  CHECK((v - 0.7 * sigma.inverse()).norm() <= 1e-10);

  const Mat v1 = compute_V(Mat::Constant(1, 1, 0.04), Mat::Constant(1, 1, 0.01), 1.0, 0.0);
  CHECK(v1(0, 0) == doctest::Approx(24.875));

  CHECK_THROWS_AS(compute_V(mat2(1.0, 2.0, 2.0, 1.0), zero_mat(2), 1.0, 0.0), NumericalError);
}

TEST_CASE("non-commuting pairs go through the Sylvester route") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat sigma = random_spd(rng, 2, 0.01);
    Mat dsigma = random_spd(rng, 2, 0.001);
    dsigma(0, 0) -= 0.01;
    const double eps = 0.5 + 0.01 * trial;
    const Mat rhs = 2.0 * eps * identity(2) - dsigma;
    const Mat v = compute_V(sigma, dsigma, eps, 0.0);
    const Mat brute = kronecker_solve(sigma, rhs);
    const Mat residual = sigma * v + v * sigma - rhs;
    if (min_eigenvalue(brute) > 0.0) {
      CHECK(residual.norm() <= 1e-10 * rhs.norm());
      CHECK((v - brute).norm() <= 1e-9 * brute.norm());
    }
    CHECK(min_eigenvalue(v) >= 0.0);
  }
}

TEST_CASE("rate floor keeps the drift definite") {
  // A fast-growing covariance would make the rate negative without the floor.
  const Mat v = compute_V(Mat::Constant(1, 1, 0.01), Mat::Constant(1, 1, 10.0), 1.0, 5.0);
  CHECK(v(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("attractor") {
  const Vec mu = Vec::Constant(1, 0.5);
  CHECK(compute_M(mu, Vec::Constant(1, 0.0), Mat::Constant(1, 1, 2.0))(0) == 0.5);
  CHECK(compute_M(mu, Vec::Constant(1, 0.1), Mat::Constant(1, 1, 2.0))(0) == doctest::Approx(0.55));
}

TEST_CASE("drift at the centroid is minus the centroid velocity") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat v = random_spd(rng, 2, 1.0);
    Vec mu(2), dmu(2);
    mu << n(rng), n(rng);
    dmu << n(rng), n(rng);
    ComponentDrift b{v, compute_M(mu, dmu, v), false};
    CHECK((b(mu) + dmu).norm() <= 1e-10 * (1.0 + dmu.norm()));
  }
}

TEST_CASE("frozen component gets a pure-diffusion placeholder") {
  StatsSeries s(0, {stats1(0.3, 0.2, 0.01), stats1(1e-12, 0.25, 0.02, true)});
  DriftOptions o;
  o.dt = 1e-3;
  auto spec = build_drift(s, 1, o);
  const auto& b = spec.components[0];
  CHECK(b.frozen);
  CHECK(b.rate(0, 0) == doctest::Approx(1e-3));
  CHECK(b.attractor(0) == 0.25);
}

TEST_CASE("stationary statistics give the stationary drift") {
  StatsSeries s(0, {stats1(1.0, 0.4, 0.02), stats1(1.0, 0.4, 0.02)});
  DriftOptions o;
  o.epsilon = 0.3;
  o.dt = 1e-2;
  auto spec = build_drift(s, 1, o);
  const auto& b = spec.components[0];
  CHECK(b.rate(0, 0) == doctest::Approx(0.3 / 0.02));
  CHECK(b.attractor(0) == doctest::Approx(0.4));
  // The oracle's stationary covariance eps / V reproduces the data covariance.
  CHECK(0.3 / b.rate(0, 0) == doctest::Approx(0.02));
}

TEST_CASE("backward versus centered differences") {
  StatsSeries s(0, {stats1(1.0, 0.0, 0.01), stats1(1.0, 0.1, 0.01), stats1(1.0, 0.3, 0.01)});
  DriftOptions o;
  o.dt = 0.1;
  o.epsilon = 1.0;
  const double v = 1.0 / 0.01;
  auto back = build_drift(s, 1, o);
  CHECK(back.components[0].attractor(0) == doctest::Approx(0.1 + 1.0 / v));
  o.derivative = DerivativeScheme::centered;
  auto mid = build_drift(s, 1, o);
  CHECK(mid.components[0].attractor(0) == doctest::Approx(0.1 + 1.5 / v));
  // No right neighbour: centered falls back to backward.
  auto end = build_drift(s, 2, o);
  CHECK(end.components[0].attractor(0) == doctest::Approx(0.3 + 2.0 / v));
}

TEST_CASE("oracle driven by the drift reproduces smooth statistics") {
  // Drift built from a synthetic series fed back through the moment ODEs follows that series to O(dt).
  auto run = [](double dt) {
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    auto mu = [](double t) { return 0.5 + 0.1 * std::sin(2.0 * t); };
    auto var = [](double t) { return 0.01 * (1.0 + 0.5 * std::sin(t)); };
    StatsSeries s(-1, {});
    for (int n = -1; n <= steps; ++n) s.push_back(stats1(1.0, mu(std::max(n, 0) * dt), var(std::max(n, 0) * dt)));
    DriftOptions o;
    o.dt = dt;
    o.epsilon = 0.7;
    o.v_floor = 1e-12;
    GaussianMoments g{Vec::Constant(1, mu(0)), Mat::Constant(1, 1, var(0)), 0.0};
    double err = 0.0;
    for (int n = 1; n <= steps; ++n) {
      const auto b = build_drift(s, n, o).components[0];
      g = ode_step(g, b.rate, b.attractor, o.epsilon, dt);
      err = std::max({err, std::abs(g.mean(0) - mu(n * dt)), std::abs(g.cov(0, 0) - var(n * dt)) * 10.0});
    }
    return err;
  };
  const double e1 = run(1e-2);
  const double e2 = run(5e-3);
  CHECK(e1 < 5e-3);
  CHECK(e2 / e1 == doctest::Approx(0.5).epsilon(0.25));
}
