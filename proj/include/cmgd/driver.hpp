#pragma once

// The two-stage outer loop: min-max directions until weak Pareto
// stationarity (or M1 steps), then min-min directions until Pareto
// stationarity (or M2 steps). Plus seeded multi-start orchestration.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cmgd/direction.hpp"
#include "cmgd/linesearch.hpp"
#include "cmgd/problem.hpp"

namespace cmgd {

struct SolveOptions {
  std::size_t m1 = 200;
  std::size_t m2 = 50;
  double tol = 1e-7;  ///< stationarity threshold on the direction certificate
  double feas_tol = 1e-8;
  std::uint64_t seed = 0;
  std::size_t stall_steps = 3;  ///< consecutive h <= h_min steps that end a stage
  DirectionOptions direction;   ///< stationarity_tol and feas_tol are overridden
  StepOptions step;             ///< feas_tol is overridden
};

enum class Termination { WeakStationaryThenStationary, MaxIterStage1, MaxIterStage2, Stalled };

std::string_view to_string(Termination t);

struct Iterate {
  Vector point;
  Vector objectives;
  double eta = 0.0;  ///< certificate of the direction that produced this point
  double h = 0.0;
  Stage stage = Stage::MinMax;
  double feasibility = 0.0;  ///< max constraint violation at point
};

struct Trajectory {
  std::vector<Iterate> iterates;  ///< iterates[0] is the start
  Termination termination = Termination::Stalled;
  std::size_t stage1_steps = 0;
  std::size_t stage2_steps = 0;
  bool stage1_certified = false;
  bool stage2_certified = false;
  double stage1_eta = 0.0;  ///< min-max certificate at the hand-off point
  double stage2_eta = 0.0;  ///< min-min certificate at the final point
  std::string diagnostics;

  const Iterate& final() const { return iterates.back(); }
};

/// Throws ContractViolation if x0 is infeasible at opts.feas_tol.
Trajectory two_stage_solve(const ProblemSpec& problem, std::span<const double> x0,
                           const SolveOptions& opts = {});

using StartSampler = std::function<Vector(std::mt19937_64&)>;

/// Draws `count` feasible starts by rejection: each start gets its own
/// generator seeded from (seed, index) and up to 1e5 draws. Throws
/// std::runtime_error naming the most violated constraint on failure.
std::vector<Vector> sample_starts(const ProblemSpec& problem, std::size_t count,
                                  const StartSampler& sampler, std::uint64_t seed,
                                  double feas_tol = 1e-8);

/// Uniform draws from the box [lower, upper].
StartSampler box_sampler(Vector lower, Vector upper);

/// Worker threads for `jobs` tasks: CMGD_THREADS if set, else the hardware
/// concurrency, never more than jobs.
std::size_t worker_count(std::size_t jobs);

/// One trajectory per start, in start order.
std::vector<Trajectory> multi_start(const ProblemSpec& problem, const std::vector<Vector>& starts,
                                    const SolveOptions& opts = {});

}  // namespace cmgd
