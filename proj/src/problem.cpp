#include "cmgd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmgd/kernels.hpp"

namespace cmgd {
namespace {

void require_dimension(const ProblemSpec& problem, std::span<const double> point) {
  if (point.size() != problem.dimension()) {
    throw ContractViolation("point has length " + std::to_string(point.size()) +
                            ", problem dimension is " + std::to_string(problem.dimension()));
  }
}

Vector checked_gradient(const Function& f, std::span<const double> point, std::size_t d,
                        const char* what, std::size_t index) {
  Vector g = f.gradient ? f.gradient(point) : finite_difference_gradient(f.value, point);
  if (g.size() != d) {
    throw ContractViolation(std::string(what) + " " + std::to_string(index) +
                            ": gradient oracle returned length " + std::to_string(g.size()) +
                            ", expected " + std::to_string(d));
  }
  return g;
}

std::vector<Function> linear_oracles(const LinearConstraints& lin) {
  std::vector<Function> out;
  out.reserve(lin.a.rows());
  for (std::size_t i = 0; i < lin.a.rows(); ++i) {
    Vector row(lin.a.row(i).begin(), lin.a.row(i).end());
    const double rhs = lin.b[i];
    Function f;
    f.value = [row, rhs](std::span<const double> x) { return kernels::dot(row, x) - rhs; };
    f.gradient = [row](std::span<const double>) { return row; };
    f.name = "row" + std::to_string(i);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

ProblemSpec::ProblemSpec(std::size_t dimension, std::vector<Function> objectives,
                         std::vector<Function> constraints, std::optional<VariableBounds> bounds)
    : dimension_(dimension),
      objectives_(std::move(objectives)),
      constraints_(std::move(constraints)),
      bounds_(std::move(bounds)) {
  validate();
}

ProblemSpec::ProblemSpec(std::size_t dimension, std::vector<Function> objectives,
                         LinearConstraints linear, std::optional<VariableBounds> bounds)
    : dimension_(dimension),
      objectives_(std::move(objectives)),
      constraints_(linear_oracles(linear)),
      linear_(std::move(linear)),
      bounds_(std::move(bounds)) {
  validate();
}

void ProblemSpec::validate() const {
  if (dimension_ == 0) throw ContractViolation("problem dimension must be >= 1");
  if (objectives_.empty()) throw ContractViolation("problem needs at least one objective");
  for (const auto& f : objectives_) {
    if (!f.value) throw ContractViolation("objective without value oracle");
  }
  for (const auto& g : constraints_) {
    if (!g.value) throw ContractViolation("constraint without value oracle");
  }
  if (linear_) {
    if (linear_->a.rows() != linear_->b.size() ||
        (linear_->a.rows() > 0 && linear_->a.cols() != dimension_)) {
      throw ContractViolation("linear constraint block has inconsistent shape");
    }
  }
  if (bounds_) {
    if (bounds_->lower.size() != dimension_ || bounds_->upper.size() != dimension_) {
      throw ContractViolation("variable bounds must have one entry per coordinate");
    }
    for (std::size_t j = 0; j < dimension_; ++j) {
      if (std::isnan(bounds_->lower[j]) || std::isnan(bounds_->upper[j]) ||
          bounds_->lower[j] > bounds_->upper[j]) {
        throw ContractViolation("invalid bounds on coordinate " + std::to_string(j));
      }
    }
  }
}

double ProblemSpec::objective_value(std::size_t t, std::span<const double> point) const {
  require_dimension(*this, point);
  return objectives_.at(t).value(point);
}

Vector ProblemSpec::objective_gradient(std::size_t t, std::span<const double> point) const {
  require_dimension(*this, point);
  return checked_gradient(objectives_.at(t), point, dimension_, "objective", t);
}

double ProblemSpec::constraint_value(std::size_t i, std::span<const double> point) const {
  require_dimension(*this, point);
  return constraints_.at(i).value(point);
}

Vector ProblemSpec::constraint_gradient(std::size_t i, std::span<const double> point) const {
  require_dimension(*this, point);
  return checked_gradient(constraints_.at(i), point, dimension_, "constraint", i);
}

Vector finite_difference_gradient(const ValueFn& f, std::span<const double> point) {
  Vector x(point.begin(), point.end());
  Vector g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = 1e-6 * (1.0 + std::abs(x[j]));
    const double keep = x[j];
    x[j] = keep + h;
    const double fp = f(x);
    x[j] = keep - h;
    const double fm = f(x);
    x[j] = keep;
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Vector evaluate_objectives(const ProblemSpec& problem, std::span<const double> point) {
  require_dimension(problem, point);
  Vector out(problem.num_objectives());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = problem.objectives()[t].value(point);
  return out;
}

GradientMatrix evaluate_gradients(const ProblemSpec& problem, std::span<const double> point) {
  require_dimension(problem, point);
  GradientMatrix g(problem.num_objectives(), problem.dimension());
  for (std::size_t t = 0; t < g.rows(); ++t) {
    const Vector row = problem.objective_gradient(t, point);
    std::copy(row.begin(), row.end(), g.row(t).begin());
  }
  return g;
}

Vector evaluate_constraints(const ProblemSpec& problem, std::span<const double> point) {
  require_dimension(problem, point);
  Vector out(problem.num_constraints());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = problem.constraints()[i].value(point);
  return out;
}

FeasibilityReport check_feasibility(const ProblemSpec& problem, std::span<const double> point,
                                    double tol) {
  if (tol < 0.0) throw ContractViolation("check_feasibility: tol must be >= 0");
  require_dimension(problem, point);
  FeasibilityReport report;
  auto note = [&](std::size_t index, double violation) {
    if (violation > 0.0) report.max_violation = std::max(report.max_violation, violation);
    if (violation > tol) report.violated_indices.push_back(index);
  };
  const std::size_t m = problem.num_constraints();
  for (std::size_t i = 0; i < m; ++i) note(i, problem.constraints()[i].value(point));
  if (const auto& b = problem.bounds()) {
    const std::size_t d = problem.dimension();
    for (std::size_t j = 0; j < d; ++j) note(m + j, b->lower[j] - point[j]);
    for (std::size_t j = 0; j < d; ++j) note(m + d + j, point[j] - b->upper[j]);
  }
  report.is_feasible = report.max_violation <= tol;
  return report;
}

double finite_diff_check(const ProblemSpec& problem, std::span<const double> point, double h) {
  if (!(h > 0.0)) throw ContractViolation("finite_diff_check: h must be positive");
  require_dimension(problem, point);
  Vector x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t t = 0; t < problem.num_objectives(); ++t) {
    const Vector g = problem.objective_gradient(t, x);
    const auto& f = problem.objectives()[t].value;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double keep = x[j];
      x[j] = keep + h;
      const double fp = f(x);
      x[j] = keep - h;
      const double fm = f(x);
      x[j] = keep;
      const double fd = (fp - fm) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[j]) / (1.0 + std::abs(g[j])));
    }
  }
  return worst;
}

bool is_strictly_feasible(const ProblemSpec& problem, std::span<const double> point, double margin) {
  require_dimension(problem, point);
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    if (!(problem.constraints()[i].value(point) < -margin)) return false;
  }
  if (const auto& b = problem.bounds()) {
    for (std::size_t j = 0; j < point.size(); ++j) {
      if (std::isfinite(b->lower[j]) && !(point[j] - b->lower[j] > margin)) return false;
      if (std::isfinite(b->upper[j]) && !(b->upper[j] - point[j] > margin)) return false;
    }
  }
  return true;
}

}  // namespace cmgd
