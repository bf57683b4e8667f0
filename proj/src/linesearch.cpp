#include "cmgd/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmgd/kernels.hpp"

namespace cmgd {
namespace {

constexpr double kInfStep = std::numeric_limits<double>::infinity();

// Ratio test for one row a.x <= b along x + t w.
double row_cap(double ax, double aw, double b) {
  if (aw <= 0.0) return kInfStep;
  const double slack = b - ax + 1e-10 * (1.0 + std::abs(b));
  return std::max(slack, 0.0) / aw;
}

class Ray {
 public:
  Ray(const ProblemSpec& problem, std::span<const double> point, std::span<const double> w,
      const StepOptions& opts)
      : problem_(problem), point_(point), w_(w), w_norm_(norm2(w)), x_(point.size()) {
    if (!problem.linear_constraints()) {
      // Nonlinear constraints may not get worse than their starting level.
      for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
        allowed_.push_back(std::max(0.5 * opts.feas_tol, problem.constraint_value(i, point)));
      }
    }
  }

  std::size_t evaluations() const { return evaluations_; }

  // Max over objectives of grad F_i(point + t w).w, each less a roundoff
  // allowance of 1e-12 |grad F_i| |w|: directions come out of an LP, so a
  // derivative held at zero there is only zero to that accuracy.
  double slope(double t) {
    move_to(t);
    ++evaluations_;
    double worst = -kInfStep;
    for (std::size_t i = 0; i < problem_.num_objectives(); ++i) {
      const Vector g = problem_.objective_gradient(i, x_);
      worst = std::max(worst, kernels::dot(g, w_) - 1e-12 * norm2(g) * w_norm_);
    }
    return worst;
  }

  bool feasible(double t) {
    if (allowed_.empty()) return true;
    move_to(t);
    ++evaluations_;
    for (std::size_t i = 0; i < allowed_.size(); ++i) {
      if (problem_.constraint_value(i, x_) > allowed_[i]) return false;
    }
    return true;
  }

  bool objectives_ok(double t, const Vector& start) {
    move_to(t);
    ++evaluations_;
    for (std::size_t i = 0; i < start.size(); ++i) {
      if (problem_.objective_value(i, x_) > start[i] + 1e-9 * (1.0 + std::abs(start[i]))) return false;
    }
    return true;
  }

 private:
  void move_to(double t) {
    for (std::size_t j = 0; j < x_.size(); ++j) x_[j] = point_[j] + t * w_[j];
  }

  const ProblemSpec& problem_;
  std::span<const double> point_;
  std::span<const double> w_;
  double w_norm_;
  Vector x_;
  Vector allowed_;
  std::size_t evaluations_ = 0;
};

}  // namespace

double linear_step_cap(const ProblemSpec& problem, std::span<const double> point,
                       std::span<const double> w) {
  double cap = kInfStep;
  if (const auto& lin = problem.linear_constraints()) {
    for (std::size_t i = 0; i < lin->a.rows(); ++i) {
      cap = std::min(cap, row_cap(kernels::dot(lin->a.row(i), point), kernels::dot(lin->a.row(i), w), lin->b[i]));
    }
  }
  if (const auto& b = problem.bounds()) {
    for (std::size_t j = 0; j < point.size(); ++j) {
      if (std::isfinite(b->upper[j])) cap = std::min(cap, row_cap(point[j], w[j], b->upper[j]));
      if (std::isfinite(b->lower[j])) cap = std::min(cap, row_cap(-point[j], -w[j], -b->lower[j]));
    }
  }
  return cap;
}

StepResult monotone_step(const ProblemSpec& problem, std::span<const double> point,
                         std::span<const double> w, const StepOptions& opts) {
  if (point.size() != problem.dimension() || w.size() != problem.dimension()) {
    throw ContractViolation("monotone_step: point and direction must have the problem dimension");
  }
  Ray ray(problem, point, w, opts);
  const double wn = norm2(w);
  StepResult res;
  if (wn == 0.0) return res;
  {
    double worst = -kInfStep, gscale = 0.0;
    for (std::size_t i = 0; i < problem.num_objectives(); ++i) {
      const Vector g = problem.objective_gradient(i, point);
      worst = std::max(worst, kernels::dot(g, w));
      gscale = std::max(gscale, norm2(g));
    }
    if (worst > opts.descent_tol * (1.0 + gscale * wn)) {
      throw ContractViolation("monotone_step: direction increases an objective (slope " +
                              std::to_string(worst) + ")");
    }
  }

  const double cap = linear_step_cap(problem, point, w);
  bool capped_by_feasibility = false;
  auto good = [&](double t, bool& infeasible) {
    infeasible = t > cap || !ray.feasible(t);
    return !infeasible && ray.slope(t) <= opts.grad_tol;
  };

  // Geometric expansion.
  double lo = 0.0, hi = kInfStep;
  double t = std::min(opts.h0, cap);
  bool infeasible = false;
  for (std::size_t k = 0; k <= opts.max_doublings; ++k) {
    if (!(t > lo)) break;
    if (!good(t, infeasible)) {
      hi = t;
      capped_by_feasibility = infeasible;
      break;
    }
    lo = t;
    if (t >= cap) {
      capped_by_feasibility = true;
      break;
    }
    t = std::min(2.0 * t, cap);
  }

  if (std::isfinite(hi)) {
    // Grid over the failing bracket, then bisection on the first failure.
    const std::size_t pts = std::max<std::size_t>(opts.grid_points, 2);
    const double base = lo, width = hi - lo;
    for (std::size_t k = 1; k < pts; ++k) {
      const double s = base + width * static_cast<double>(k) / static_cast<double>(pts);
      if (!good(s, infeasible)) {
        hi = s;
        capped_by_feasibility = infeasible;
        break;
      }
      lo = s;
    }
    while (hi - lo > opts.h_rel_tol * hi && hi - lo > opts.h_min) {
      const double mid = 0.5 * (lo + hi);
      if (good(mid, infeasible)) {
        lo = mid;
      } else {
        hi = mid;
        capped_by_feasibility = infeasible;
      }
    }
  }

  // Spot-check the accepted interval and the objective values.
  Vector start(problem.num_objectives());
  for (std::size_t i = 0; i < start.size(); ++i) start[i] = problem.objective_value(i, point);
  double h = lo;
  while (h >= opts.h_min) {
    bool ok = ray.objectives_ok(h, start);
    for (double f : {0.25, 0.5, 0.75, 1.0}) {
      if (!ok) break;
      ok = good(f * h, infeasible);
    }
    if (ok) break;
    h *= 0.5;
  }

  res.evaluations = ray.evaluations();
  if (h < opts.h_min) {
    res.h = opts.h_min;
    res.boundary_limited = true;
    return res;
  }
  res.h = h;
  res.boundary_limited = capped_by_feasibility;
  return res;
}

}  // namespace cmgd
