#pragma once

// Search-direction subproblems of the two-stage method.
//
// Stage 1 (min-max): minimise max_t g_t.d, the worst directional derivative.
// Stage 2 (min-min): minimise min_t g_t.d subject to g_t.d <= 0 for all t.
// Both keep point + d feasible and |d|_2 <= 1. By default the ball is
// replaced by the box |d|_inf <= 1 so each subproblem is a single LP, and the
// answer is rescaled onto the ball afterwards. The exact mode enforces the
// ball through tangent cutting planes.

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>

#include "cmgd/linalg.hpp"
#include "cmgd/lp.hpp"
#include "cmgd/problem.hpp"

namespace cmgd {

enum class Stage { MinMax, MinMin };
enum class DirectionStatus { Descent, Stationary, SubproblemFailed };

std::string_view to_string(Stage stage);
std::string_view to_string(DirectionStatus status);

/// How constraints enter the direction LP.
///   ExactLinear: A d <= b - A point (needs linear constraints).
///   Linearized:  grad g_i(point).d <= -g_i(point) / eta_lin.
///   Auto:        ExactLinear for linear problems, Linearized otherwise.
enum class ConstraintMode { Auto, ExactLinear, Linearized };

struct DirectionOptions {
  double stationarity_tol = 1e-7;
  double feas_tol = 1e-8;
  ConstraintMode mode = ConstraintMode::Auto;
  double eta_lin = 0.1;
  bool exact_l2 = false;
  std::size_t max_cuts = 60;  ///< cutting-plane budget of the exact mode
  /// Optional d x d change of variables: the subproblem is solved for e with
  /// d = metric * e, and the box or ball bounds e rather than d.
  std::shared_ptr<const Matrix> metric;
  /// Optional rows r with r.d = 0 imposed on the direction (each r has length d).
  std::shared_ptr<const Matrix> null_rows;
};

struct DirectionResult {
  Vector d;
  double eta = 0.0;  ///< max_t g_t.d (stage 1) or min_t g_t.d (stage 2)
  Stage stage = Stage::MinMax;
  DirectionStatus status = DirectionStatus::SubproblemFailed;
  Vector derivatives;  ///< g_t.d for every objective
  std::size_t lp_iterations = 0;
};

/// Linear rows R d <= r describing the constraint set around `point`.
struct ConstraintRows {
  Matrix a;
  Vector b;
};

ConstraintRows build_constraint_rows(const ProblemSpec& problem, std::span<const double> point,
                                     ConstraintMode mode, double eta_lin = 0.1);

/// d if |d|_2 <= 1, else d / |d|_2.
Vector norm_postscale(std::span<const double> d);

DirectionResult stage1_direction(const ProblemSpec& problem, std::span<const double> point,
                                 const GradientMatrix& gradients, const DirectionOptions& opts = {});

DirectionResult stage2_direction(const ProblemSpec& problem, std::span<const double> point,
                                 const GradientMatrix& gradients, const DirectionOptions& opts = {});

}  // namespace cmgd
