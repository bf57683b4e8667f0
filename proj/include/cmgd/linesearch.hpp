#pragma once

// Step length along a common descent direction: the largest h such that
// every objective keeps a non-positive directional derivative on (0, h) and
// point + h w stays feasible.

#include <cstddef>
#include <span>

#include "cmgd/linalg.hpp"
#include "cmgd/problem.hpp"

namespace cmgd {

struct StepOptions {
  double h0 = 1e-3;
  std::size_t max_doublings = 60;
  double h_rel_tol = 1e-6;
  double grad_tol = 0.0;
  double h_min = 1e-12;
  double feas_tol = 1e-8;
  std::size_t grid_points = 32;
  double descent_tol = 1e-8;  ///< allowed positive slope of w at the start
};

struct StepResult {
  double h = 0.0;
  std::size_t evaluations = 0;  ///< points at which gradients or constraints were evaluated
  bool boundary_limited = false;
};

/// Largest step with sampled directional derivatives <= grad_tol, capped by
/// feasibility. Throws ContractViolation if w ascends some objective at
/// `point` beyond descent_tol.
StepResult monotone_step(const ProblemSpec& problem, std::span<const double> point,
                         std::span<const double> w, const StepOptions& opts = {});

/// Largest t >= 0 keeping the linear rows and variable bounds satisfied
/// along point + t w (infinity if none limits). Rows may overshoot by
/// 1e-10 (1 + |b|).
double linear_step_cap(const ProblemSpec& problem, std::span<const double> point,
                       std::span<const double> w);

}  // namespace cmgd
