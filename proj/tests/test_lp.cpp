#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cmgd/lp.hpp"
#include "doctest.h"

using namespace cmgd;

namespace {

// Brute-force oracle for 2-variable LPs: enumerate pairwise intersections of
// all constraint lines (rows and finite bounds), keep the feasible ones.
double vertex_enumeration_2d(const LpProblem& lp) {
  std::vector<std::array<double, 3>> lines;  // a0 x + a1 y <= b
  for (std::size_t i = 0; i < lp.a_ub.rows(); ++i) {
    lines.push_back({lp.a_ub(i, 0), lp.a_ub(i, 1), lp.b_ub[i]});
  }
  for (std::size_t j = 0; j < 2; ++j) {
    std::array<double, 3> lo{0, 0, -lp.lower[j]}, up{0, 0, lp.upper[j]};
    lo[j] = -1.0;
    up[j] = 1.0;
    lines.push_back(lo);
    lines.push_back(up);
  }
  double best = kInf;
  for (std::size_t a = 0; a < lines.size(); ++a) {
    for (std::size_t b = a + 1; b < lines.size(); ++b) {
      const double det = lines[a][0] * lines[b][1] - lines[a][1] * lines[b][0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (lines[a][2] * lines[b][1] - lines[a][1] * lines[b][2]) / det;
      const double y = (lines[a][0] * lines[b][2] - lines[a][2] * lines[b][0]) / det;
      const std::vector<double> pt{x, y};
      if (lp_violation(lp, pt) > 1e-9) continue;
      best = std::min(best, lp.c[0] * x + lp.c[1] * y);
    }
  }
  return best;
}

LpProblem one_dim(double c, Matrix a, Vector b, double lo, double up) {
  LpProblem lp = make_lp({c}, {lo}, {up});
  lp.a_ub = std::move(a);
  lp.b_ub = std::move(b);
  return lp;
}

}  // namespace

TEST_CASE("one-dimensional maximisation hits the row") {
  const auto sol = solve_lp(one_dim(-1.0, Matrix{{1.0}}, {1.0}, 0.0, kInf));
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.objective == doctest::Approx(-1.0));
}

TEST_CASE("symmetric covering row") {
  LpProblem lp = make_lp({1.0, 1.0}, {0.0, 0.0}, {kInf, kInf});
  lp.a_ub = Matrix{{-1.0, -1.0}};
  lp.b_ub = {-1.0};
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(lp_violation(lp, sol.x) <= 1e-8);
}

TEST_CASE("empty feasible set is reported, not thrown") {
  const auto sol = solve_lp(one_dim(0.0, Matrix{{1.0}}, {-1.0}, 0.0, kInf));
  CHECK(sol.status == LpStatus::Infeasible);
}

TEST_CASE("unbounded ray") {
  const auto sol = solve_lp(one_dim(-1.0, Matrix{{-1.0}}, {0.0}, 0.0, kInf));
  CHECK(sol.status == LpStatus::Unbounded);
}

TEST_CASE("free variable epigraph") {
  // min eta s.t. x - eta <= 0, -x - eta <= 0, x in [-1, 1]  -> eta = 0
  LpProblem lp = make_lp({0.0, 1.0}, {-1.0, -kInf}, {1.0, kInf});
  lp.a_ub = Matrix{{1.0, -1.0}, {-1.0, -1.0}};
  lp.b_ub = {0.0, 0.0};
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("inverted bounds are infeasible") {
  const auto sol = solve_lp(make_lp({1.0}, {1.0}, {0.0}));
  CHECK(sol.status == LpStatus::Infeasible);
}

TEST_CASE("NaN data is a contract violation") {
  CHECK_THROWS_AS(solve_lp(one_dim(std::nan(""), Matrix{{1.0}}, {1.0}, 0.0, 1.0)), ContractViolation);
  CHECK_THROWS_AS(solve_lp(one_dim(1.0, Matrix{{1.0}}, {1.0, 2.0}, 0.0, 1.0)), ContractViolation);
}

TEST_CASE("two-variable LPs agree with vertex enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    LpProblem lp = make_lp({u(rng), u(rng)}, {-2.0, -3.0}, {2.5, 1.5});
    const int p = 1 + trial % 6;
    for (int i = 0; i < p; ++i) {
      const double row[2] = {u(rng), u(rng)};
      lp.a_ub.append_row(row);
      lp.b_ub.push_back(1.0 + 0.5 * u(rng));  // origin stays feasible
    }
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(vertex_enumeration_2d(lp)).epsilon(1e-9));
  }
}

TEST_CASE("weak duality spot check on random feasible LPs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> kd(1, 20), pd(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = kd(rng), p = pd(rng);
    std::vector<Vector> samples(100, Vector(k));
    for (auto& s : samples) {
      for (auto& v : s) v = 3.0 * u(rng);
    }
    Vector c(k);
    for (auto& v : c) v = u(rng);
    LpProblem lp = make_lp(c, Vector(k, -5.0), Vector(k, 5.0));
    for (int i = 0; i < p; ++i) {
      Vector row(k);
      for (auto& v : row) v = u(rng);
      double rhs = -kInf;
      for (const auto& s : samples) rhs = std::max(rhs, std::inner_product(row.begin(), row.end(), s.begin(), 0.0));
      lp.a_ub.append_row(row);
      lp.b_ub.push_back(rhs + 0.1 * (u(rng) + 1.0));
    }
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(lp_violation(lp, sol.x) <= 1e-8);
    for (const auto& s : samples) {
      CHECK(sol.objective <= std::inner_product(c.begin(), c.end(), s.begin(), 0.0) + 1e-9);
    }

    // Row permutation leaves the optimum unchanged.
    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    LpProblem shuffled = make_lp(c, lp.lower, lp.upper);
    for (auto i : perm) {
      shuffled.a_ub.append_row(lp.a_ub.row(i));
      shuffled.b_ub.push_back(lp.b_ub[i]);
    }
    const auto sol2 = solve_lp(shuffled);
    REQUIRE(sol2.status == LpStatus::Optimal);
    CHECK(std::abs(sol2.objective - sol.objective) <= 1e-9);
  }
}

TEST_CASE("origin-infeasible start goes through phase one") {
  // x + y >= 3 and x - y <= 1 with x,y in [0, 5]; min x + 2y -> (2, 1), value 4
  LpProblem lp = make_lp({1.0, 2.0}, {0.0, 0.0}, {5.0, 5.0});
  lp.a_ub = Matrix{{-1.0, -1.0}, {1.0, -1.0}};
  lp.b_ub = {-3.0, 1.0};
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(2.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("degenerate instance terminates") {
  // Classic cycling-prone example (Beale), as minimisation with bounds.
  LpProblem lp = make_lp({-0.75, 150.0, -0.02, 6.0}, Vector(4, 0.0), Vector(4, kInf));
  lp.a_ub = Matrix{{0.25, -60.0, -0.04, 9.0}, {0.5, -90.0, -0.02, 3.0}, {0.0, 0.0, 1.0, 0.0}};
  lp.b_ub = {0.0, 0.0, 1.0};
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-0.05));
}

TEST_CASE("many bounded columns, few rows") {
  // Portfolio-shaped: sum x = 1 as two rows, x >= 0, maximise a linear score.
  const std::size_t k = 400;
  Vector c(k);
  for (std::size_t j = 0; j < k; ++j) c[j] = -std::sin(0.37 * static_cast<double>(j));
  LpProblem lp = make_lp(c, Vector(k, 0.0), Vector(k, 0.01));
  lp.a_ub.append_row(Vector(k, 1.0));
  lp.a_ub.append_row(Vector(k, -1.0));
  lp.b_ub = {1.0, -1.0};
  const auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  // Oracle: greedy fill of the 100 best scores at the 0.01 cap.
  Vector sorted = c;
  std::sort(sorted.begin(), sorted.end());
  const double expect = 0.01 * std::accumulate(sorted.begin(), sorted.begin() + 100, 0.0);
  CHECK(sol.objective == doctest::Approx(expect).epsilon(1e-10));
  CHECK(lp_violation(lp, sol.x) <= 1e-8);
}
