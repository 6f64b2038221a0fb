#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "evoclust/errors.hpp"
#include "evoclust/estep.hpp"
#include "evoclust/gaussian_oracle.hpp"
#include "evoclust/metrics.hpp"
#include "helpers.hpp"

using namespace evoclust;
using evoclust::test::line;
using evoclust::test::random_masses;
using evoclust::test::square;

namespace {

// Successive shortest paths on the residual network, used as an independent transport solver.
double min_cost_flow(std::vector<double> supply, std::vector<double> demand,
                     const std::vector<std::vector<double>>& cost) {
  const std::size_t n = supply.size(), m = demand.size();
  std::vector<std::vector<double>> flow(n, std::vector<double>(m, 0.0));
  double total = 0.0;
  const double tiny = 1e-14;
  for (int round = 0; round < 100000; ++round) {
    // Nodes: sources 0..n-1, sinks n..n+m-1. Multi-source Bellman-Ford.
    std::vector<double> dist(n + m, std::numeric_limits<double>::infinity());
    std::vector<long> prev(n + m, -1);
    for (std::size_t i = 0; i < n; ++i)
      if (supply[i] > tiny) dist[i] = 0.0;
    for (std::size_t pass = 0; pass < n + m; ++pass) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          if (dist[i] + cost[i][j] < dist[n + j] - 1e-15) {
            dist[n + j] = dist[i] + cost[i][j];
            prev[n + j] = static_cast<long>(i);
            changed = true;
          }
          if (flow[i][j] > tiny && dist[n + j] - cost[i][j] < dist[i] - 1e-15) {
            dist[i] = dist[n + j] - cost[i][j];
            prev[i] = static_cast<long>(n + j);
            changed = true;
          }
        }
      if (!changed) break;
    }
    long sink = -1;
    for (std::size_t j = 0; j < m; ++j)
      if (demand[j] > tiny && std::isfinite(dist[n + j]) && (sink < 0 || dist[n + j] < dist[sink]))
        sink = static_cast<long>(n + j);
    if (sink < 0) break;
    double push = demand[sink - n];
    long v = sink;
    while (prev[v] >= 0) {
      const long u = prev[v];
      if (v < static_cast<long>(n)) push = std::min(push, flow[v][u - n]);
      v = u;
    }
    push = std::min(push, supply[v]);
    v = sink;
    while (prev[v] >= 0) {
      const long u = prev[v];
      if (v >= static_cast<long>(n)) {
        flow[u][v - n] += push;
        total += push * cost[u][v - n];
      } else {
        flow[v][u - n] -= push;
        total -= push * cost[v][u - n];
      }
      v = u;
    }
    supply[v] -= push;
    demand[sink - n] -= push;
  }
  return total;
}

DensityField random_field(std::mt19937_64& rng, const GridPtr& g) {
  DensityField f(g, random_masses(rng, g->size(), 0.3), 0.0);
  if (f.mass() == 0.0) f.values[0] = 1.0;
  f.normalize();
  return f;
}

double brute_cdf_w1(const DensityField& f, const DensityField& m) {
  const double h = f.grid->spacing(0);
  double a = 0.0, b = 0.0, fm = f.mass(), mm = m.mass(), out = 0.0;
  for (std::size_t i = 0; i + 1 < f.values.size(); ++i) {
    a += h * f.values[i] / fm;
    b += h * m.values[i] / mm;
    out += h * std::abs(a - b);
  }
  return out;
}

}  // namespace

TEST_CASE("transport solver agrees with an independent min-cost flow") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng), m = size(rng);
    std::vector<double> s(n), d(m);
    double ss = 0.0, sd = 0.0;
    for (double& x : s) ss += (x = u(rng) < 0.2 ? 0.0 : u(rng));
    for (double& x : d) sd += (x = u(rng) < 0.2 ? 0.0 : u(rng));
    if (ss == 0.0) ss = s[0] = 1.0;
    if (sd == 0.0) sd = d[0] = 1.0;
    for (double& x : s) x /= ss;
    for (double& x : d) x /= sd;
    std::vector<std::vector<double>> c(n, std::vector<double>(m));
    for (auto& row : c)
      for (double& x : row) x = trial % 3 == 0 ? std::floor(4.0 * u(rng)) : u(rng);
    const auto plan = solve_transport(s, d, c);
    CHECK(std::abs(plan.cost - min_cost_flow(s, d, c)) <= 1e-10);
    std::vector<double> out(n, 0.0), in(m, 0.0);
    double cost = 0.0;
    for (std::size_t e = 0; e < plan.mass.size(); ++e) {
      CHECK(plan.mass[e] >= -1e-15);
      out[plan.source[e]] += plan.mass[e];
      in[plan.target[e]] += plan.mass[e];
      cost += plan.mass[e] * c[plan.source[e]][plan.target[e]];
    }
    for (int i = 0; i < n; ++i) CHECK(std::abs(out[i] - s[i]) <= 1e-12);
    for (int j = 0; j < m; ++j) CHECK(std::abs(in[j] - d[j]) <= 1e-12);
    CHECK(std::abs(cost - plan.cost) <= 1e-12);
  }
}

TEST_CASE("transport input checks") {
  std::vector<double> a{0.5, 0.5}, b{1.0}, bad{0.4}, neg{-0.5, 1.5};
  std::vector<std::vector<double>> c{{1.0}, {2.0}};
  CHECK_NOTHROW(solve_transport(a, b, c));
  CHECK_THROWS_AS(solve_transport(a, bad, c), ConfigError);
  CHECK_THROWS_AS(solve_transport(neg, b, c), ConfigError);
  std::vector<std::vector<double>> wide{{1.0, 2.0}, {2.0, 1.0}};
  CHECK_THROWS_AS(solve_transport(a, b, wide), ConfigError);
}

TEST_CASE("w1 on simple fields") {
  auto g = line(0.0, 1.0, 100);
  DensityField p(g, 0.0), q(g, 0.0);
  p.values[10] = 1.0;
  q.values[60] = 1.0;
  CHECK(w1_1d(p, p) == 0.0);
  CHECK(w1_1d(p, q) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w1_lp_oracle(p, q).cost == doctest::Approx(0.5).epsilon(1e-12));

  auto self = w1_lp_oracle(p, p);
  CHECK(self.cost == 0.0);
  for (std::size_t e = 0; e < self.mass.size(); ++e)
    if (self.mass[e] > 0.0) CHECK(self.source[e] == self.target[e]);

  auto g2 = square(0.0, 1.0, 10);
  DensityField a(g2, 0.0), b(g2, 0.0);
  a.values[g2->flat_index(1, 1)] = 1.0;
  b.values[g2->flat_index(4, 5)] = 1.0;
  bool approx = true;
  CHECK(w1(a, b, &approx) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(approx);
}

TEST_CASE("CDF formula equals the linear program in one dimension") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> size(2, 200);
  for (int trial = 0; trial < 150; ++trial) {
    auto g = line(0.0, 1.0 + trial % 3, size(rng));
    const auto f = random_field(rng, g), m = random_field(rng, g);
    const double cdf = w1_1d(f, m);
    CHECK(std::abs(cdf - w1_lp_oracle(f, m).cost) <= 1e-10);
    CHECK(std::abs(cdf - brute_cdf_w1(f, m)) <= 1e-12);
  }
}

TEST_CASE("metric axioms on random samples") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const bool two = trial % 2 == 1;
    auto g = two ? square(0.0, 1.0, 9) : line(0.0, 1.0, 80);
    const auto a = random_field(rng, g), b = random_field(rng, g), c = random_field(rng, g);
    const double ab = w1(a, b), ba = w1(b, a), bc = w1(b, c), ac = w1(a, c);
    CHECK(std::abs(ab - ba) <= 1e-10);
    CHECK(w1(a, a) <= 1e-12);
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("translated bump costs its shift") {
  for (int n : {100, 400}) {
    auto g = line(0.0, 1.0, n);
    const auto a = grid_gaussian({Vec::Constant(1, 0.4), Mat::Constant(1, 1, 0.002), 0.0}, g);
    const auto b = grid_gaussian({Vec::Constant(1, 0.5), Mat::Constant(1, 1, 0.002), 0.0}, g);
    CHECK(w1_1d(a, b) == doctest::Approx(0.1).epsilon(1e-3));
  }
}

TEST_CASE("coarsening keeps mass and flags the 2d result as approximate") {
  std::mt19937_64 rng(5);
  auto g = square(0.0, 1.0, 40);
  const auto f = random_field(rng, g);
  const auto c = coarsen(f, 200);
  CHECK(c.grid->size() <= 200);
  CHECK(c.mass() == doctest::Approx(1.0).epsilon(1e-12));
  bool approx = false;
  const double d = w1(f, random_field(rng, g), &approx);
  CHECK(approx);
  CHECK(d > 0.0);
  auto small = square(0.0, 1.0, 10);
  CHECK(coarsen(DensityField(small, std::vector<double>(100, 1.0), 0.0), 200).grid->size() == 100);
}

TEST_CASE("centroid error with label matching") {
  auto v = [](double x) { return Vec::Constant(1, x); };
  std::vector<Vec> truth{v(0.15), v(0.5), v(0.85)};
  std::vector<Vec> est{v(0.1), v(0.5), v(0.9)};
  CHECK(centroid_error(est, truth) == doctest::Approx(0.10));
  CHECK(centroid_error(truth, truth) == 0.0);
  std::vector<Vec> perm{v(0.85), v(0.15), v(0.5)};
  CHECK(centroid_error(perm, truth) == 0.0);
  std::vector<Vec> two{v(0.84), v(0.16)};
  CHECK(centroid_error(two, truth) == doctest::Approx(0.02));
  std::vector<Vec> none;
  CHECK_THROWS_AS(centroid_error(none, truth), ConfigError);
}

TEST_CASE("total variation") {
  std::vector<std::vector<double>> constant(10, {0.3, 0.7});
  CHECK(total_variation(constant) == 0.0);
  for (int steps : {2, 10, 1000}) {
    std::vector<std::vector<double>> ramp;
    for (int n = 0; n <= steps; ++n) ramp.push_back({static_cast<double>(n) / steps});
    CHECK(total_variation(ramp) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const double a = 0.25;
  const int count = 17;
  std::vector<std::vector<double>> osc;
  for (int n = 0; n < count; ++n) osc.push_back({n % 2 ? -a : a});
  CHECK(total_variation(osc) == doctest::Approx(2.0 * a * (count - 1)));

  std::vector<std::vector<Vec>> moves;
  Vec p(2);
  p << 0.0, 0.0;
  moves.push_back({p});
  p << 0.3, 0.4;
  moves.push_back({p});
  CHECK(total_variation(moves) == doctest::Approx(0.7));
}

TEST_CASE("hard clusters partition the support") {
  auto g = line(0.0, 1.0, 6);
  ResponsibilityField gamma{g, 2, {0.7, 0.5, 0.1, 0.2, 0.9, 0.5, 0.3, 0.5, 0.9, 0.8, 0.1, 0.5}, 0.0};
  DensityField f(g, {1.0, 1.0, 1.0, 0.0, 1.0, 2.0}, 0.0);
  const auto labels = hard_clusters(gamma, f);
  const std::vector<int> expected{0, 0, 1, -1, 0, 0};
  CHECK(labels == expected);

  std::mt19937_64 rng(8);
  auto g2 = square(0.0, 1.0, 20);
  std::vector<DensityField> comps;
  for (int k = 0; k < 3; ++k) comps.push_back(random_field(rng, g2));
  std::vector<double> w{0.2, 0.3, 0.5};
  const auto gm = responsibilities(w, comps);
  const auto data = random_field(rng, g2);
  const auto hard = hard_clusters(gm, data);
  for (std::size_t i = 0; i < hard.size(); ++i) {
    if (data.values[i] > 0.0) {
      REQUIRE(hard[i] >= 0);
      for (int k = 0; k < 3; ++k) CHECK(gm(hard[i], i) >= gm(k, i));
    } else {
      CHECK(hard[i] == -1);
    }
  }
}

TEST_CASE("alignment lag recovers a known delay") {
  std::vector<std::vector<double>> ref, late, early;
  for (int n = 0; n < 400; ++n) {
    ref.push_back({std::sin(0.03 * n), std::cos(0.02 * n)});
    late.push_back({std::sin(0.03 * (n - 12)), std::cos(0.02 * (n - 12))});
    early.push_back({std::sin(0.03 * (n + 5)), std::cos(0.02 * (n + 5))});
  }
  CHECK(alignment_lag(late, ref, 50) == 12);
  CHECK(alignment_lag(early, ref, 50) == -5);
  CHECK(alignment_lag(ref, ref, 50) == 0);
}
