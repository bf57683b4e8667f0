#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include "cmgd/driver.hpp"
#include "cmgd/problems.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cmgd;

namespace {

// Per-step monotonicity, feasibility and stage ordering of one trajectory.
void check_invariants(const ProblemSpec& p, const Trajectory& t, double feas_tol) {
  bool seen_stage2 = false;
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    const Iterate& it = t.iterates[k];
    CHECK(it.feasibility <= feas_tol);
    CHECK(check_feasibility(p, it.point, feas_tol).is_feasible);
    if (k > 0) {
      const Vector& prev = t.iterates[k - 1].objectives;
      for (std::size_t i = 0; i < prev.size(); ++i) {
        CHECK(it.objectives[i] <= prev[i] + 1e-9 * (1.0 + std::abs(prev[i])));
      }
      CHECK(it.h > 0.0);
    }
    if (it.stage == Stage::MinMin) seen_stage2 = true;
    if (seen_stage2) CHECK(it.stage == Stage::MinMin);
  }
  // Steps at h_min are counted but leave no iterate.
  CHECK(t.iterates.size() <= t.stage1_steps + t.stage2_steps + 1);
}

}  // namespace

TEST_CASE("toy problem converges to the analytic Pareto set") {
  const ProblemSpec p = toy_problem();
  const auto starts = sample_starts(p, 50, box_sampler({-1, -1, -1}, {1, 1, 1}), 7);
  REQUIRE(starts.size() == 50);
  SolveOptions o;
  o.m2 = 100;
  const auto runs = multi_start(p, starts, o);
  REQUIRE(runs.size() == 50);
  for (const auto& t : runs) {
    CHECK(t.termination == Termination::WeakStationaryThenStationary);
    CHECK(t.stage1_certified);
    CHECK(t.stage2_certified);
    CHECK(t.stage1_eta >= -o.tol);
    CHECK(t.stage2_eta >= -o.tol);
    const Vector& x = t.final().point;
    CHECK(toy_distance_to_pareto_set(x) <= 1e-2);
    const double s = std::clamp((x[0] + x[1] + x[2]) / 3.0, -1.0 / 3.0, 1.0 / 3.0);
    const auto [f1, f2] = toy_analytic_front(s);
    CHECK(std::abs(t.final().objectives[0] - f1) <= 1e-3);
    CHECK(std::abs(t.final().objectives[1] - f2) <= 1e-3);
    check_invariants(p, t, o.feas_tol);
    // The final point dominates or equals the start.
    for (std::size_t i = 0; i < 2; ++i) CHECK(t.final().objectives[i] <= t.iterates.front().objectives[i] + 1e-12);
  }
}

TEST_CASE("certificates at stage exits are reproducible from the direction LP") {
  const ProblemSpec p = toy_problem();
  const auto starts = sample_starts(p, 5, box_sampler({-1, -1, -1}, {1, 1, 1}), 3);
  SolveOptions o;
  for (const auto& x0 : starts) {
    const Trajectory t = two_stage_solve(p, x0, o);
    const Vector& x = t.final().point;
    DirectionOptions d;
    d.stationarity_tol = o.tol;
    CHECK(stage2_direction(p, x, evaluate_gradients(p, x), d).eta >= -o.tol);
    // The hand-off point is the last stage-1 iterate.
    Vector handoff = t.iterates.front().point;
    for (const auto& it : t.iterates) {
      if (it.stage == Stage::MinMax) handoff = it.point;
    }
    CHECK(stage1_direction(p, handoff, evaluate_gradients(p, handoff), d).eta >= -o.tol);
  }
}

TEST_CASE("a Pareto-stationary start takes no steps") {
  const ProblemSpec p = toy_problem();
  const Trajectory t = two_stage_solve(p, Vector{0.2, 0.2, 0.2});
  CHECK(t.iterates.size() == 1);
  CHECK(t.stage1_steps == 0);
  CHECK(t.stage2_steps == 0);
  CHECK(t.termination == Termination::WeakStationaryThenStationary);
}

TEST_CASE("single objective with box constraints reaches the constrained minimiser") {
  // min |x - (2, -3, 0.5)|^2 over [-1, 1]^3 -> (1, -1, 0.5).
  ProblemSpec p(3, {fixture::squared_distance({2.0, -3.0, 0.5})}, LinearConstraints{Matrix(0, 3), {}},
                VariableBounds{{-1, -1, -1}, {1, 1, 1}});
  const Trajectory t = two_stage_solve(p, Vector{0.0, 0.0, 0.0});
  CHECK(t.termination == Termination::WeakStationaryThenStationary);
  const Vector& x = t.final().point;
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(x[1] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(x[2] == doctest::Approx(0.5).epsilon(1e-6));
  check_invariants(p, t, 1e-8);
}

TEST_CASE("an objective resting at its minimum does not freeze the min-min stage") {
  // f1 = x1^2 sits at its minimum; raising x2 forces x1 up through x2 - x1 <= 0.5
  // only beyond x2 = 0.5. Stage 2 must still climb to x2 = 0.5 without touching f1.
  Function f1{[](std::span<const double> x) { return x[0] * x[0]; },
              [](std::span<const double> x) { return Vector{2.0 * x[0], 0.0}; }, "f1"};
  ProblemSpec p(2, {f1, fixture::squared_distance({0.0, 1.0})}, LinearConstraints{Matrix{{-1.0, 1.0}}, {0.5}});
  // squared_distance also charges x1; f2 = x1^2 + (x2 - 1)^2.
  const Trajectory t = two_stage_solve(p, Vector{0.0, 0.0});
  check_invariants(p, t, 1e-8);
  CHECK(t.final().point[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(t.final().objectives[0] <= 1e-20);
}

TEST_CASE("multi_start edge cases and determinism") {
  const ProblemSpec p = toy_problem();
  CHECK(multi_start(p, {}).empty());
  CHECK(sample_starts(p, 0, box_sampler({-1, -1, -1}, {1, 1, 1}), 1).empty());

  const auto starts = sample_starts(p, 8, box_sampler({-1, -1, -1}, {1, 1, 1}), 99);
  CHECK(starts == sample_starts(p, 8, box_sampler({-1, -1, -1}, {1, 1, 1}), 99));
  CHECK(starts != sample_starts(p, 8, box_sampler({-1, -1, -1}, {1, 1, 1}), 100));

  setenv("CMGD_THREADS", "1", 1);
  CHECK(worker_count(8) == 1);
  const auto serial = multi_start(p, starts);
  setenv("CMGD_THREADS", "4", 1);
  CHECK(worker_count(8) == 4);
  CHECK(worker_count(2) == 2);
  const auto parallel = multi_start(p, starts);
  unsetenv("CMGD_THREADS");
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t s = 0; s < serial.size(); ++s) {
    REQUIRE(serial[s].iterates.size() == parallel[s].iterates.size());
    for (std::size_t k = 0; k < serial[s].iterates.size(); ++k) {
      CHECK(serial[s].iterates[k].point == parallel[s].iterates[k].point);
      CHECK(serial[s].iterates[k].objectives == parallel[s].iterates[k].objectives);
    }
    CHECK(serial[s].iterates.front().point == starts[s]);
  }
}

TEST_CASE("start validation") {
  const ProblemSpec p = toy_problem();
  CHECK_THROWS_AS(two_stage_solve(p, Vector{1.0, 1.0, 1.0}), ContractViolation);
  SolveOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(two_stage_solve(p, Vector{0.0, 0.0, 0.0}, bad), ContractViolation);

  // A box entirely outside the feasible slab cannot yield a start.
  try {
    (void)sample_starts(p, 1, box_sampler({2, 2, 2}, {3, 3, 3}), 1);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("most violated: row0") != std::string::npos);
  }
  CHECK_THROWS_AS(box_sampler({0.0}, {1.0, 2.0}), ContractViolation);
  CHECK_THROWS_AS(box_sampler({1.0}, {0.0}), ContractViolation);
}

TEST_CASE("portfolio starts are feasible before solving") {
  PortfolioOptions o;
  o.n = 100;
  const auto [p, inst] = portfolio_problem(o);
  const auto starts = sample_starts(
      p, 20, [&inst](std::mt19937_64& rng) { return portfolio_random_allocation(inst, rng); }, 5);
  REQUIRE(starts.size() == 20);
  for (const auto& x : starts) CHECK(check_feasibility(p, x, 1e-12).is_feasible);
}

TEST_CASE("budget exhaustion is reported per stage") {
  const ProblemSpec p = toy_problem();
  SolveOptions o;
  o.m1 = 1;
  o.m2 = 0;
  const Trajectory t = two_stage_solve(p, Vector{0.9, -0.5, -0.6}, o);
  CHECK(t.stage1_steps <= 1);
  CHECK(t.stage2_steps == 0);
  CHECK(t.termination == Termination::MaxIterStage1);
}
