#include <algorithm>
#include <random>

#include "cmgd/pareto.hpp"
#include "cmgd/problem.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cmgd;

namespace {

std::vector<ParetoEntry> entries(const std::vector<Vector>& objs) {
  std::vector<ParetoEntry> out;
  for (std::size_t i = 0; i < objs.size(); ++i) out.push_back({Vector{double(i)}, objs[i], std::to_string(i)});
  return out;
}

std::vector<Vector> objectives_of(const ParetoFront& f) {
  std::vector<Vector> out;
  for (const auto& e : f.entries) out.push_back(e.objectives);
  return out;
}

std::vector<Vector> random_points(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> pts(n, Vector(dim));
  for (auto& p : pts) {
    for (auto& v : p) v = u(rng);
  }
  return pts;
}

}  // namespace

TEST_CASE("dominates examples") {
  CHECK(dominates(Vector{1, 2}, Vector{2, 3}));
  CHECK_FALSE(dominates(Vector{1, 3}, Vector{3, 1}));
  CHECK_FALSE(dominates(Vector{3, 1}, Vector{1, 3}));
  CHECK_FALSE(dominates(Vector{1, 2}, Vector{1, 2}));
  CHECK(dominates(Vector{1, 2}, Vector{1, 3}));
  CHECK_THROWS_AS(dominates(Vector{1, 2}, Vector{1, 2, 3}), ContractViolation);
}

TEST_CASE("dominates is irreflexive and transitive") {
  std::mt19937_64 rng(5);
  // Coarse values make equal components and dominance chains common.
  std::uniform_int_distribution<int> coarse(0, 3);
  auto draw = [&] {
    Vector v(3);
    for (auto& x : v) x = coarse(rng);
    return v;
  };
  std::size_t chains = 0;
  for (int k = 0; k < 100000; ++k) {
    const Vector a = draw(), b = draw(), c = draw();
    REQUIRE_FALSE(dominates(a, a));
    if (dominates(a, b) && dominates(b, c)) {
      ++chains;
      REQUIRE(dominates(a, c));
    }
    REQUIRE_FALSE((dominates(a, b) && dominates(b, a)));
  }
  CHECK(chains > 1000);
}

TEST_CASE("non_dominated_filter examples") {
  const auto f = non_dominated_filter(entries({{1, 2}, {2, 1}, {2, 2}}));
  CHECK(objectives_of(f) == std::vector<Vector>{{1, 2}, {2, 1}});
  CHECK(non_dominated_filter({}).empty());
}

TEST_CASE("duplicates keep the first occurrence") {
  const auto f = non_dominated_filter(entries({{1, 2}, {2, 1}, {1, 2 + 1e-13}, {2, 1}}));
  REQUIRE(f.size() == 2);
  CHECK(f.entries[0].origin == "0");
  CHECK(f.entries[1].origin == "1");
}

TEST_CASE("filter matches the brute-force oracle on 1000 random points") {
  std::mt19937_64 rng(21);
  const auto pts = random_points(1000, 3, rng);
  const auto front = non_dominated_filter(entries(pts));
  const auto expected = oracle::non_dominated_indices(pts);
  REQUIRE(front.size() == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CHECK(front.entries[k].origin == std::to_string(expected[k]));
    CHECK(front.entries[k].objectives == pts[expected[k]]);
  }
}

TEST_CASE("filter is idempotent and leaves no dominated pair") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto front = non_dominated_filter(entries(random_points(300, 2 + trial % 3, rng)));
    const auto again = non_dominated_filter(front.entries);
    CHECK(objectives_of(again) == objectives_of(front));
    for (const auto& a : front.entries) {
      for (const auto& b : front.entries) CHECK_FALSE(dominates(a.objectives, b.objectives));
    }
  }
}

TEST_CASE("merge_fronts") {
  SUBCASE("disjoint non-dominated fronts give the union") {
    const ParetoFront a = non_dominated_filter(entries({{0, 3}, {1, 2}}));
    const ParetoFront b = non_dominated_filter(entries({{2, 1}, {3, 0}}));
    CHECK(merge_fronts({a, b}).size() == 4);
  }
  SUBCASE("a dominated front disappears") {
    ParetoFront a = non_dominated_filter(entries({{2, 3}, {3, 2}}));
    ParetoFront b = non_dominated_filter(entries({{1, 2}, {2, 1}}));
    for (auto& e : b.entries) e.origin = "b" + e.origin;
    const auto m = merge_fronts({a, b});
    REQUIRE(m.size() == 2);
    CHECK(m.entries[0].origin == "b0");
    CHECK(m.entries[1].origin == "b1");
  }
  SUBCASE("partition invariance, commutativity, associativity") {
    std::mt19937_64 rng(13);
    const auto pts = random_points(600, 3, rng);
    auto all = entries(pts);
    std::vector<std::vector<ParetoEntry>> parts(3);
    for (std::size_t i = 0; i < all.size(); ++i) parts[i % 3].push_back(all[i]);
    const ParetoFront f0 = non_dominated_filter(parts[0]), f1 = non_dominated_filter(parts[1]),
                      f2 = non_dominated_filter(parts[2]);
    auto sorted = [](const ParetoFront& f) {
      auto o = objectives_of(f);
      std::sort(o.begin(), o.end());
      return o;
    };
    const auto direct = sorted(non_dominated_filter(all));
    CHECK(sorted(merge_fronts({f0, f1, f2})) == direct);
    CHECK(sorted(merge_fronts({f2, f0, f1})) == direct);
    CHECK(sorted(merge_fronts({merge_fronts({f0, f1}), f2})) == sorted(merge_fronts({f0, merge_fronts({f1, f2})})));
  }
  SUBCASE("mismatched widths") {
    const ParetoFront a = non_dominated_filter(entries({{0, 3}}));
    const ParetoFront b = non_dominated_filter(entries({{0, 3, 1}}));
    CHECK_THROWS_AS(merge_fronts({a, b}), ContractViolation);
  }
}
