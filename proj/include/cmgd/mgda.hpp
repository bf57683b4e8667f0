#pragma once

// Unconstrained multiple-gradient descent building block: the minimum-norm
// point of the convex hull of the objective gradients, computed by
// Frank-Wolfe with away steps over the weight simplex. Wolfe's criterion
// x^T p_j >= |x|^2 for every generator p_j certifies the result.

#include <cstddef>
#include <span>

#include "cmgd/linalg.hpp"

namespace cmgd {

struct MinNormResult {
  Vector alpha;  ///< simplex weights, one per gradient row
  Vector w;      ///< sum_t alpha_t * p_t
  double norm_sq = 0.0;
  bool certificate_ok = false;
  std::size_t iterations = 0;
};

/// max_iter == 0 selects 10 * n * d (at least 100).
MinNormResult min_norm_point(const GradientMatrix& gradients, double tol = 1e-9,
                             std::size_t max_iter = 0);

/// True iff x^T p_j >= |x|^2 - tol for every row p_j.
bool wolfe_certificate(std::span<const double> x, const GradientMatrix& points, double tol);

/// Wolfe gap max(|x|^2 - min_j x^T p_j, 0).
double wolfe_gap(std::span<const double> x, const GradientMatrix& points);

/// Constrained min-norm subproblem over two gradients (the single-stage
/// constrained MGDA variant). Minimises |x(lambda)|^2 over the segment
/// x(lambda) = p1 + lambda (p2 - p1) subject to the linear constraints
/// A (theta - step * x) <= b. Kept as a test fixture: the result need not be
/// a common descent direction.
struct ConstrainedHullResult {
  bool feasible = false;
  double lambda = 0.0;
  Vector hull_point;  ///< x; the update direction is -x
};

ConstrainedHullResult constrained_segment_min_norm(const GradientMatrix& two_gradients,
                                                   const Matrix& a, std::span<const double> b,
                                                   std::span<const double> theta, double step);

/// A fixed two-dimensional instance where the constrained hull point is not a
/// common descent direction.
struct ConstrainedHullCounterexample {
  GradientMatrix gradients;  ///< rows p1 = (-1, 2), p2 = (3, 1)
  Matrix a;                  ///< constraint rows A theta <= b
  Vector b;
  Vector theta;              ///< current point (on the constraint boundary)
  double step = 1.0;
  Vector direction;  ///< -x for the constrained hull point x
};

ConstrainedHullCounterexample constrained_hull_counterexample();

}  // namespace cmgd
