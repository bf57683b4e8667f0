#pragma once

// Dense two-phase primal simplex for small linear programs
//
//   minimise c^T x  subject to  A_ub x <= b_ub,  lower <= x <= upper.
//
// Variable bounds are handled natively (bounded-variable simplex, bound
// flips without pivots), so simple bounds never become rows. Pricing is
// Dantzig's rule with a fallback to Bland's rule after a run of degenerate
// pivots. The tableau is rebuilt from the original data through a dense LU
// of the basis every `refactor_interval` pivots.

#include <cstddef>
#include <limits>
#include <string_view>

#include "cmgd/linalg.hpp"

namespace cmgd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpProblem {
  Vector c;
  Matrix a_ub;  ///< p x k (may have zero rows)
  Vector b_ub;
  Vector lower;  ///< length k, entries may be -inf
  Vector upper;  ///< length k, entries may be +inf
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

struct LpOptions {
  double primal_tol = 1e-9;  ///< feasibility tolerance while pivoting
  double dual_tol = 1e-9;    ///< reduced-cost tolerance, relative to max |c|
  double pivot_tol = 1e-9;
  double exit_tol = 1e-8;  ///< feasibility required of an Optimal answer
  std::size_t refactor_interval = 100;
  std::size_t max_iterations = 0;  ///< 0 selects 50 * (p + k) + 1000
};

/// Builds an LP with every variable bounded in [lower, upper] and no rows.
LpProblem make_lp(Vector c, Vector lower, Vector upper);

LpSolution solve_lp(const LpProblem& lp, const LpOptions& options = {});

/// Max violation of rows and bounds at x (0 when feasible).
double lp_violation(const LpProblem& lp, std::span<const double> x);

}  // namespace cmgd
