#include <cmath>
#include <random>

#include "doctest.h"
#include "evoclust/errors.hpp"
#include "evoclust/fp_solver.hpp"
#include "evoclust/gaussian_oracle.hpp"
#include "helpers.hpp"

using namespace evoclust;
using evoclust::test::line;
using evoclust::test::square;

namespace {

ComponentDrift drift1(double v, double m) { return {Mat::Constant(1, 1, v), Vec::Constant(1, m), false}; }

ComponentDrift zero_drift(int d) { return {zero_mat(d), Vec::Constant(d, 0.5), false}; }

DensityField gaussian_field(const GridPtr& g, double mean, double var) {
  return grid_gaussian({Vec::Constant(1, mean), Mat::Constant(1, 1, var), 0.0}, g);
}

}  // namespace

TEST_CASE("zero drift operator is a stochastic matrix") {
  for (auto g : {line(0.0, 1.0, 100), square(0.0, 1.0, 30)}) {
    const auto a = assemble_operator(zero_drift(g->dim()), 0.01, 1e-3, g);
    for (std::size_t j = 0; j < g->size(); ++j) CHECK(a.column_sum(j) == doctest::Approx(1.0).epsilon(1e-14));
    for (double w : a.weight) CHECK(w >= 0.0);
  }
}

TEST_CASE("no drift and no diffusion is the identity") {
  auto g = line(0.0, 1.0, 50);
  const auto a = assemble_operator(zero_drift(1), 0.0, 1e-3, g);
  std::mt19937_64 rng(9);
  DensityField m(g, evoclust::test::random_masses(rng, g->size()), 0.0);
  const auto out = step(m, a);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(out.values[i] == doctest::Approx(m.values[i]).epsilon(1e-12));
}

TEST_CASE("point mass variance grows by 2 eps dt per step") {
  auto g = line(0.0, 1.0, 200);
  const double eps = 0.02, dt = 1e-3;
  DensityField m(g, 0.0);
  m.values[100] = 1.0 / g->cell_measure();
  const auto a = assemble_operator(zero_drift(1), eps, dt, g);
  const double x0 = g->coord(0, 100);
  for (int n = 1; n <= 20; ++n) {
    m = step(m, a);
    const auto mom = grid_moments(m);
    CHECK(mom.mean(0) == doctest::Approx(x0).epsilon(1e-12));
    CHECK(mom.cov(0, 0) == doctest::Approx(2.0 * eps * dt * n).epsilon(1e-9));
  }

  auto g2 = square(0.0, 1.0, 60);
  DensityField p(g2, 0.0);
  p.values[g2->flat_index(30, 30)] = 1.0 / g2->cell_measure();
  const auto a2 = assemble_operator(zero_drift(2), eps, dt, g2);
  for (int n = 0; n < 5; ++n) p = step(p, a2);
  const auto mom = grid_moments(p);
  CHECK(mom.cov(0, 0) == doctest::Approx(2.0 * eps * dt * 5).epsilon(1e-9));
  CHECK(mom.cov(1, 1) == doctest::Approx(2.0 * eps * dt * 5).epsilon(1e-9));
  CHECK(std::abs(mom.cov(0, 1)) <= 1e-12);
}

TEST_CASE("uniform density is unchanged away from the boundary") {
  auto g = line(0.0, 1.0, 100);
  DensityField m(g, std::vector<double>(g->size(), 1.0), 0.0);
  const auto out = step(m, assemble_operator(zero_drift(1), 0.01, 1e-3, g));
  for (int i = 10; i < 90; ++i) CHECK(out.values[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nonnegativity and mass conservation under random drifts") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uv(0.1, 5.0), um(0.3, 0.7);
  for (int trial = 0; trial < 30; ++trial) {
    const bool two = trial % 2 == 1;
    auto g = two ? square(0.0, 1.0, 40) : line(0.0, 1.0, 150);
    const int d = g->dim();
    Mat v = zero_mat(d);
    for (int a = 0; a < d; ++a) v(a, a) = uv(rng);
    ComponentDrift b{v, Vec::Constant(d, um(rng)), false};
    DensityField m = grid_gaussian({Vec::Constant(d, um(rng)), 0.004 * identity(d), 0.0}, g);
    const double mass0 = m.mass();
    FpOptions opts;
    opts.cfl_max = 1e9;
    const auto a = assemble_operator(b, 0.01, 1e-3, g, opts);
    for (int n = 0; n < 20; ++n) m = step(m, a);
    for (double x : m.values) CHECK(x >= 0.0);
    CHECK(std::abs(m.mass() - mass0) <= 1e-12);
  }
}

TEST_CASE("mass pushed against the wall stays in the domain") {
  auto g = line(0.0, 1.0, 50);
  DensityField m(g, 0.0);
  m.values[49] = 1.0 / g->cell_measure();
  FpOptions opts;
  opts.cfl_max = 1e9;
  const auto a = assemble_operator(drift1(5.0, 5.0), 0.05, 1e-2, g, opts);
  for (int n = 0; n < 10; ++n) m = step(m, a);
  CHECK(m.mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pure diffusion matches the heat kernel") {
  auto g = line(0.0, 1.0, 200);
  const double eps = 0.01, dt = 1e-3, var0 = 1e-4;
  for (bool matched : {true, false}) {
    FpOptions opts;
    opts.moment_matched = matched;
    DensityField m = gaussian_field(g, 0.5, var0);
    const auto a = assemble_operator(zero_drift(1), eps, dt, g, opts);
    for (int n = 0; n < 100; ++n) m = step(m, a);
    const double exact = var0 + 2.0 * eps * 0.1;
    CHECK(grid_moments(m).cov(0, 0) == doctest::Approx(exact).epsilon(0.03));
    CHECK(grid_moments(m).mean(0) == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("mean relaxes exponentially to the attractor") {
  auto g = line(0.0, 1.0, 200);
  const double dt = 1e-3, v = 2.0, target = 0.6;
  DensityField m = gaussian_field(g, 0.4, 0.002);
  const auto a = assemble_operator(drift1(v, target), 0.01, dt, g);
  std::vector<double> gap;
  for (int n = 1; n <= 1000; ++n) {
    m = step(m, a);
    if (n % 250 == 0) gap.push_back(target - grid_moments(m).mean(0));
  }
  for (std::size_t i = 0; i < gap.size(); ++i) {
    const double t = 0.25 * static_cast<double>(i + 1);
    CHECK(gap[i] == doctest::Approx(0.2 * std::exp(-v * t)).epsilon(0.03));
  }
  const double rate = std::log(gap.front() / gap.back()) / 0.75;
  CHECK(rate == doctest::Approx(v).epsilon(0.02));
}

TEST_CASE("time stepping helpers") {
  auto g = line(0.0, 1.0, 100);
  DensityField m0 = gaussian_field(g, 0.5, 0.003);
  TimeGrid none(1.0, 1.0, 0, 0);
  std::vector<ComponentDrift> drifts;
  auto seq = evolve(m0, drifts, 0.01, none, {});
  REQUIRE(seq.size() == 1);
  CHECK(seq[0].values == m0.values);

  auto tg = build_time_grid(0.01, 1e-3, 0.0);
  drifts.assign(10, drift1(1.0, 0.5));
  seq = evolve(m0, drifts, 0.01, tg, {});
  CHECK(seq.size() == 11);
  CHECK(seq.back().time == doctest::Approx(0.01));
  drifts.pop_back();
  CHECK_THROWS_AS(evolve(m0, drifts, 0.01, tg, {}), Error);
}

TEST_CASE("CFL control") {
  auto g = line(0.0, 1.0, 100);
  DensityField m = gaussian_field(g, 0.5, 0.003);
  const auto fast = drift1(400.0, 0.2);
  CHECK_THROWS_AS(assemble_operator(fast, 0.01, 1e-3, g), CflError);
  FpOptions opts;
  const auto adv = advance(m, fast, 0.01, 1e-3, opts);
  CHECK(adv.substeps == static_cast<int>(std::ceil(adv.cfl)));
  CHECK(adv.substeps > 1);
  CHECK(adv.density.mass() == doctest::Approx(m.mass()).epsilon(1e-12));
  CHECK(adv.density.time == doctest::Approx(1e-3));
  opts.max_substeps = 2;
  CHECK_THROWS_AS(advance(m, fast, 0.01, 1e-3, opts), CflError);
  CHECK_THROWS_AS(assemble_operator(zero_drift(1), 10.0, 0.1, g), CflError);
}
