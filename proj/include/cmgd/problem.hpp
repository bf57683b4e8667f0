#pragma once

// Constrained multi-objective problem description:
//
//   minimise (F_1(x), ..., F_n(x))  subject to  g_i(x) <= 0,  i = 1..m
//
// Objectives and constraints are value/gradient oracle pairs. When every
// constraint is affine the problem may carry the matrix form A x <= b, which
// lets the direction subproblems use the constraints exactly instead of a
// linearisation. Per-coordinate bounds are always handled exactly.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmgd/linalg.hpp"

namespace cmgd {

using ValueFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<Vector(std::span<const double>)>;

/// A scalar function with an optional analytic gradient. A missing gradient
/// is replaced by central differences with step 1e-6 * (1 + |x_j|).
struct Function {
  ValueFn value;
  GradientFn gradient;
  std::string name;
};

/// Affine constraint block A x - b <= 0.
struct LinearConstraints {
  Matrix a;
  Vector b;
};

struct VariableBounds {
  Vector lower;  ///< may hold -infinity
  Vector upper;  ///< may hold +infinity
};

/// Immutable problem definition. Oracles must be pure; a ProblemSpec can be
/// shared between threads.
class ProblemSpec {
 public:
  /// General form. Constraint oracles are taken as given.
  ProblemSpec(std::size_t dimension, std::vector<Function> objectives,
              std::vector<Function> constraints = {},
              std::optional<VariableBounds> bounds = std::nullopt);

  /// All constraints affine. Value/gradient oracles are generated from the
  /// rows so the linearised and exact paths see the same constraints.
  ProblemSpec(std::size_t dimension, std::vector<Function> objectives, LinearConstraints linear,
              std::optional<VariableBounds> bounds = std::nullopt);

  std::size_t dimension() const { return dimension_; }
  std::size_t num_objectives() const { return objectives_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }

  const std::vector<Function>& objectives() const { return objectives_; }
  const std::vector<Function>& constraints() const { return constraints_; }
  const std::optional<LinearConstraints>& linear_constraints() const { return linear_; }
  const std::optional<VariableBounds>& bounds() const { return bounds_; }

  /// True when the exact linear subproblem path applies (affine rows or no
  /// constraints at all).
  bool is_linear() const { return linear_.has_value() || constraints_.empty(); }

  double objective_value(std::size_t t, std::span<const double> point) const;
  Vector objective_gradient(std::size_t t, std::span<const double> point) const;
  double constraint_value(std::size_t i, std::span<const double> point) const;
  Vector constraint_gradient(std::size_t i, std::span<const double> point) const;

 private:
  void validate() const;

  std::size_t dimension_;
  std::vector<Function> objectives_;
  std::vector<Function> constraints_;
  std::optional<LinearConstraints> linear_;
  std::optional<VariableBounds> bounds_;
};

struct FeasibilityReport {
  /// max_i g_i(x) clamped below at zero; bound violations are included.
  double max_violation = 0.0;
  /// Indices [0, m) are constraints, m + j a lower bound on x_j and
  /// m + d + j an upper bound on x_j.
  std::vector<std::size_t> violated_indices;
  bool is_feasible = true;
};

/// Central-difference gradient used when a Function has no analytic one.
Vector finite_difference_gradient(const ValueFn& f, std::span<const double> point);

Vector evaluate_objectives(const ProblemSpec& problem, std::span<const double> point);
GradientMatrix evaluate_gradients(const ProblemSpec& problem, std::span<const double> point);
Vector evaluate_constraints(const ProblemSpec& problem, std::span<const double> point);

FeasibilityReport check_feasibility(const ProblemSpec& problem, std::span<const double> point,
                                    double tol);

/// Max over objectives and coordinates of |central difference - oracle| / (1 + |oracle|).
double finite_diff_check(const ProblemSpec& problem, std::span<const double> point, double h);

/// True if every constraint is strictly negative and every bound strictly
/// satisfied (Slater point). Informational only; solvers do not require it.
bool is_strictly_feasible(const ProblemSpec& problem, std::span<const double> point,
                          double margin = 0.0);

}  // namespace cmgd
