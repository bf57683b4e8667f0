#include "cmgd/direction.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "cmgd/kernels.hpp"

namespace cmgd {
namespace {

constexpr double kRelax = 1e-10;

void require_inputs(const ProblemSpec& problem, std::span<const double> point,
                    const GradientMatrix& gradients) {
  if (point.size() != problem.dimension()) throw ContractViolation("direction: point has wrong length");
  if (gradients.rows() != problem.num_objectives() || gradients.cols() != problem.dimension()) {
    throw ContractViolation("direction: gradient matrix must be n x d");
  }
  for (double v : gradients.data()) {
    if (!std::isfinite(v)) throw ContractViolation("direction: non-finite gradient entry");
  }
}

// Box for d: the unit box intersected with the variable bounds shifted to
// the point, widened where needed so that d = 0 stays inside.
void direction_box(const ProblemSpec& problem, std::span<const double> point, Vector& lo, Vector& hi) {
  const std::size_t n = problem.dimension();
  lo.assign(n, -1.0);
  hi.assign(n, 1.0);
  if (const auto& b = problem.bounds()) {
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = std::min(0.0, std::max(lo[j], b->lower[j] - point[j]));
      hi[j] = std::max(0.0, std::min(hi[j], b->upper[j] - point[j]));
    }
  }
}

// Minimiser of c.d over {|d| <= 1, M d = q}: the sphere centred at the
// least-norm solution p of M d = q, radius sqrt(1 - |p|^2), walked against
// the projection of c onto the null space of M. Rows are orthonormalised by
// Gram-Schmidt; dependent rows are dropped.
std::optional<Vector> ball_on_affine(std::span<const double> c, const std::vector<Vector>& m,
                                     const Vector& q) {
  const std::size_t dim = c.size();
  std::vector<Vector> basis;
  Vector rhs;
  for (std::size_t i = 0; i < m.size(); ++i) {
    Vector u = m[i];
    double beta = q[i];
    const double scale = norm2(u);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double proj = kernels::dot(u, basis[j]);
      kernels::axpy(-proj, basis[j], u);
      beta -= proj * rhs[j];
    }
    const double len = norm2(u);
    if (len <= 1e-10 * std::max(scale, 1.0)) {
      if (std::abs(beta) > 1e-8 * (1.0 + std::abs(q[i]))) return std::nullopt;
      continue;
    }
    kernels::scale(1.0 / len, u);
    basis.push_back(std::move(u));
    rhs.push_back(beta / len);
  }
  Vector p(dim, 0.0), cn(c.begin(), c.end());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    kernels::axpy(rhs[j], basis[j], p);
    kernels::axpy(-kernels::dot(c, basis[j]), basis[j], cn);
  }
  const double pp = kernels::dot(p, p);
  if (pp > 1.0) return std::nullopt;
  const double cnn = norm2(cn);
  if (cnn <= 1e-14) return p;
  kernels::axpy(-std::sqrt(1.0 - pp) / cnn, cn, p);
  return p;
}

// Direction LP over (d[, eta]). Stage 1 has the epigraph variable eta at
// index dim and its first `objective_rows` rows are g_t.d - eta <= 0.
struct DirectionLp {
  LpProblem lp;
  std::size_t dim = 0;
  bool epigraph = false;
  std::size_t objective_rows = 0;
};

double lp_objective_at(const DirectionLp& p, std::span<const double> d) {
  if (!p.epigraph) return kernels::dot(std::span<const double>(p.lp.c.data(), p.dim), d);
  double worst = -kInf;
  for (std::size_t t = 0; t < p.objective_rows; ++t) {
    worst = std::max(worst, kernels::dot(p.lp.a_ub.row(t).first(p.dim), d));
  }
  return worst;
}

bool feasible_direction(const DirectionLp& p, std::span<const double> d, double tol) {
  if (norm2(d) > 1.0 + 1e-12) return false;
  for (std::size_t j = 0; j < p.dim; ++j) {
    if (d[j] < p.lp.lower[j] - tol || d[j] > p.lp.upper[j] + tol) return false;
  }
  for (std::size_t i = p.objective_rows; i < p.lp.b_ub.size(); ++i) {
    if (kernels::dot(p.lp.a_ub.row(i).first(p.dim), d) > p.lp.b_ub[i] + tol * (1.0 + std::abs(p.lp.b_ub[i]))) {
      return false;
    }
  }
  return true;
}

// Exact solve on the face identified by the last cutting-plane LP.
std::optional<Vector> polish_on_active_face(const DirectionLp& p, std::span<const double> x) {
  constexpr double kActive = 1e-6;
  const std::size_t dim = p.dim;
  const std::span<const double> d = x.first(dim);
  std::vector<Vector> m;
  Vector q;
  Vector c;
  if (p.epigraph) {
    const double top = lp_objective_at(p, d);
    std::optional<std::size_t> lead;
    for (std::size_t t = 0; t < p.objective_rows; ++t) {
      const auto g = p.lp.a_ub.row(t).first(dim);
      if (kernels::dot(g, d) < top - kActive * (1.0 + std::abs(top))) continue;
      if (!lead) {
        lead = t;
        c.assign(g.begin(), g.end());
        continue;
      }
      Vector diff(g.begin(), g.end());
      kernels::axpy(-1.0, c, diff);
      m.push_back(std::move(diff));
      q.push_back(0.0);
    }
  } else {
    c.assign(p.lp.c.begin(), p.lp.c.begin() + static_cast<std::ptrdiff_t>(dim));
  }
  for (std::size_t i = p.objective_rows; i < p.lp.b_ub.size(); ++i) {
    const auto row = p.lp.a_ub.row(i).first(dim);
    const double b = p.lp.b_ub[i];
    if (kernels::dot(row, d) >= b - kActive * (1.0 + std::abs(b))) {
      m.emplace_back(row.begin(), row.end());
      q.push_back(b);
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    const bool at_lo = d[j] <= p.lp.lower[j] + kActive && p.lp.lower[j] > -1.0;
    const bool at_hi = d[j] >= p.lp.upper[j] - kActive && p.lp.upper[j] < 1.0;
    if (at_lo || at_hi) {
      Vector e(dim, 0.0);
      e[j] = 1.0;
      m.push_back(std::move(e));
      q.push_back(at_lo ? p.lp.lower[j] : p.lp.upper[j]);
    }
  }
  return ball_on_affine(c, m, q);
}

// In exact mode the ball is approached by tangent cuts u.d <= 1,
// u = d_k / |d_k|, and the final answer is polished on the active face.
LpSolution solve_direction_lp(const DirectionLp& p, const DirectionOptions& opts) {
  LpSolution sol = solve_lp(p.lp);
  if (!opts.exact_l2 || sol.status != LpStatus::Optimal) return sol;
  const std::size_t dim = p.dim;
  if (norm2(std::span<const double>(sol.x.data(), dim)) <= 1.0 + 1e-12) return sol;

  LpProblem lp = p.lp;
  std::size_t total_iterations = sol.iterations;
  Vector cut(lp.c.size(), 0.0);
  Vector last_x = sol.x;
  for (std::size_t k = 0; k < opts.max_cuts; ++k) {
    const std::span<const double> d(last_x.data(), dim);
    const double nrm = norm2(d);
    if (nrm <= 1.0 + 1e-9) break;
    std::fill(cut.begin(), cut.end(), 0.0);
    for (std::size_t j = 0; j < dim; ++j) cut[j] = d[j] / nrm;
    lp.a_ub.append_row(cut);
    lp.b_ub.push_back(1.0);
    const LpSolution next = solve_lp(lp);
    total_iterations += next.iterations;
    if (next.status != LpStatus::Optimal) break;
    last_x = next.x;
  }
  sol.iterations = total_iterations;

  Vector best = norm_postscale(std::span<const double>(last_x.data(), dim));
  double best_value = lp_objective_at(p, best);
  if (const auto polished = polish_on_active_face(p, last_x)) {
    const double value = lp_objective_at(p, *polished);
    if (feasible_direction(p, *polished, 1e-10) && value <= best_value) {
      best = *polished;
      best_value = value;
    }
  }
  std::copy(best.begin(), best.end(), sol.x.begin());
  if (p.epigraph) sol.x[dim] = best_value;
  sol.objective = best_value;
  return sol;
}

// Appends constraint rows (padded with zeros for trailing variables) and
// returns the index of the first one.
std::size_t append_constraint_rows(LpProblem& lp, const ConstraintRows& rows, std::size_t width) {
  const std::size_t first = lp.b_ub.size();
  Vector row(width, 0.0);
  for (std::size_t i = 0; i < rows.a.rows(); ++i) {
    std::copy(rows.a.row(i).begin(), rows.a.row(i).end(), row.begin());
    lp.a_ub.append_row(row);
    lp.b_ub.push_back(rows.b[i]);
  }
  return first;
}

void relax_rows(LpProblem& lp, std::size_t first) {
  for (std::size_t i = first; i < lp.b_ub.size(); ++i) lp.b_ub[i] = std::max(lp.b_ub[i], 0.0) + kRelax;
}

LpSolution solve_with_relaxation(DirectionLp p, std::size_t first_constraint_row,
                                 const DirectionOptions& opts) {
  LpSolution sol = solve_direction_lp(p, opts);
  if (sol.status == LpStatus::Infeasible && first_constraint_row < p.lp.b_ub.size()) {
    relax_rows(p.lp, first_constraint_row);
    sol = solve_direction_lp(p, opts);
  }
  return sol;
}

Vector derivatives_of(const GradientMatrix& g, std::span<const double> d) { return multiply(g, d); }

}  // namespace

std::string_view to_string(Stage stage) { return stage == Stage::MinMax ? "min-max" : "min-min"; }

std::string_view to_string(DirectionStatus status) {
  switch (status) {
    case DirectionStatus::Descent: return "descent";
    case DirectionStatus::Stationary: return "stationary";
    case DirectionStatus::SubproblemFailed: return "subproblem-failed";
  }
  return "?";
}

ConstraintRows build_constraint_rows(const ProblemSpec& problem, std::span<const double> point,
                                     ConstraintMode mode, double eta_lin) {
  if (point.size() != problem.dimension()) throw ContractViolation("build_constraint_rows: point has wrong length");
  if (mode == ConstraintMode::Auto) {
    mode = problem.linear_constraints() ? ConstraintMode::ExactLinear : ConstraintMode::Linearized;
  }
  ConstraintRows rows;
  rows.a = Matrix(0, problem.dimension());
  if (mode == ConstraintMode::ExactLinear) {
    if (!problem.is_linear()) throw ContractViolation("build_constraint_rows: exact rows need linear constraints");
    if (const auto& lin = problem.linear_constraints()) {
      rows.a = lin->a;
      rows.b = lin->b;
      for (std::size_t i = 0; i < rows.b.size(); ++i) rows.b[i] -= kernels::dot(lin->a.row(i), point);
    }
    return rows;
  }
  if (!(eta_lin > 0.0)) throw ContractViolation("build_constraint_rows: eta_lin must be positive");
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    const Vector g = problem.constraint_gradient(i, point);
    rows.a.append_row(g);
    rows.b.push_back(-problem.constraint_value(i, point) / eta_lin);
  }
  return rows;
}

Vector norm_postscale(std::span<const double> d) {
  Vector out(d.begin(), d.end());
  const double nrm = norm2(d);
  if (nrm > 1.0) kernels::scale(1.0 / nrm, out);
  return out;
}

namespace {

// The subproblem in the variable e, with d = P e for the optional metric P
// (identity when absent). Gradients and rows are mapped to e; under a metric
// the variable bounds become rows and e gets the plain unit box.
struct Geometry {
  GradientMatrix g;
  ConstraintRows rows;
  Vector lo, hi;
  const Matrix* metric = nullptr;

  Vector to_direction(std::span<const double> e) const {
    return metric ? multiply(*metric, e) : Vector(e.begin(), e.end());
  }
};

Matrix times_metric(const Matrix& a, const Matrix& p) {
  Matrix out(a.rows(), p.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const Vector r = multiply_transposed(p, a.row(i));
    std::copy(r.begin(), r.end(), out.row(i).begin());
  }
  return out;
}

Geometry make_geometry(const ProblemSpec& problem, std::span<const double> point,
                       const GradientMatrix& gradients, const DirectionOptions& opts) {
  Geometry geo;
  geo.rows = build_constraint_rows(problem, point, opts.mode, opts.eta_lin);
  const std::size_t dim = problem.dimension();
  if (opts.null_rows) {
    if (opts.null_rows->cols() != dim) throw ContractViolation("direction: null rows must have length d");
    Vector neg(dim);
    for (std::size_t i = 0; i < opts.null_rows->rows(); ++i) {
      const auto r = opts.null_rows->row(i);
      for (std::size_t j = 0; j < dim; ++j) neg[j] = -r[j];
      geo.rows.a.append_row(r);
      geo.rows.b.push_back(0.0);
      geo.rows.a.append_row(neg);
      geo.rows.b.push_back(0.0);
    }
  }
  if (!opts.metric) {
    geo.g = gradients;
    direction_box(problem, point, geo.lo, geo.hi);
    return geo;
  }
  const Matrix& p = *opts.metric;
  if (p.rows() != dim || p.cols() != dim) throw ContractViolation("direction: metric must be d x d");
  geo.metric = &p;
  geo.g = times_metric(gradients, p);
  geo.rows.a = times_metric(geo.rows.a, p);
  geo.lo.assign(dim, -1.0);
  geo.hi.assign(dim, 1.0);
  if (const auto& b = problem.bounds()) {
    Vector row(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (std::isfinite(b->upper[j])) {
        std::copy(p.row(j).begin(), p.row(j).end(), row.begin());
        geo.rows.a.append_row(row);
        geo.rows.b.push_back(b->upper[j] - point[j]);
      }
      if (std::isfinite(b->lower[j])) {
        for (std::size_t k = 0; k < dim; ++k) row[k] = -p(j, k);
        geo.rows.a.append_row(row);
        geo.rows.b.push_back(point[j] - b->lower[j]);
      }
    }
  }
  return geo;
}

void finish(DirectionResult& res, const GradientMatrix& gradients, const DirectionOptions& opts) {
  const std::size_t dim = gradients.cols();
  if (res.status == DirectionStatus::SubproblemFailed || res.eta >= -opts.stationarity_tol) {
    if (res.status != DirectionStatus::SubproblemFailed) res.status = DirectionStatus::Stationary;
    res.d.assign(dim, 0.0);
    res.derivatives.assign(gradients.rows(), 0.0);
  } else {
    res.status = DirectionStatus::Descent;
  }
}

}  // namespace

DirectionResult stage1_direction(const ProblemSpec& problem, std::span<const double> point,
                                 const GradientMatrix& gradients, const DirectionOptions& opts) {
  require_inputs(problem, point, gradients);
  const std::size_t dim = problem.dimension();
  const std::size_t n = gradients.rows();
  const Geometry geo = make_geometry(problem, point, gradients, opts);

  // Variables (e, eta): minimise eta subject to g_t.e - eta <= 0.
  LpProblem lp;
  lp.lower = geo.lo;
  lp.upper = geo.hi;
  lp.lower.push_back(-kInf);
  lp.upper.push_back(kInf);
  lp.c.assign(dim + 1, 0.0);
  lp.c[dim] = 1.0;
  lp.a_ub = Matrix(0, dim + 1);
  Vector row(dim + 1);
  for (std::size_t t = 0; t < n; ++t) {
    std::copy(geo.g.row(t).begin(), geo.g.row(t).end(), row.begin());
    row[dim] = -1.0;
    lp.a_ub.append_row(row);
    lp.b_ub.push_back(0.0);
  }
  const std::size_t first = append_constraint_rows(lp, geo.rows, dim + 1);

  DirectionResult res;
  res.stage = Stage::MinMax;
  const LpSolution sol = solve_with_relaxation(DirectionLp{std::move(lp), dim, true, n}, first, opts);
  res.lp_iterations = sol.iterations;
  if (sol.status != LpStatus::Optimal) {
    res.status = DirectionStatus::SubproblemFailed;
  } else {
    res.d = geo.to_direction(norm_postscale(std::span<const double>(sol.x.data(), dim)));
    res.derivatives = derivatives_of(gradients, res.d);
    res.eta = *std::max_element(res.derivatives.begin(), res.derivatives.end());
    res.status = DirectionStatus::Descent;
  }
  finish(res, gradients, opts);
  return res;
}

DirectionResult stage2_direction(const ProblemSpec& problem, std::span<const double> point,
                                 const GradientMatrix& gradients, const DirectionOptions& opts) {
  require_inputs(problem, point, gradients);
  const std::size_t dim = problem.dimension();
  const std::size_t n = gradients.rows();
  const Geometry geo = make_geometry(problem, point, gradients, opts);

  // Shared rows: g_t.e <= 0 for every t, then the constraint rows.
  LpProblem base;
  base.lower = geo.lo;
  base.upper = geo.hi;
  base.a_ub = Matrix(0, dim);
  for (std::size_t t = 0; t < n; ++t) {
    base.a_ub.append_row(geo.g.row(t));
    base.b_ub.push_back(0.0);
  }
  const std::size_t first = append_constraint_rows(base, geo.rows, dim);

  DirectionResult res;
  res.stage = Stage::MinMin;
  res.status = DirectionStatus::SubproblemFailed;
  for (std::size_t k = 0; k < n; ++k) {
    LpProblem lp = base;
    lp.c.assign(geo.g.row(k).begin(), geo.g.row(k).end());
    const LpSolution sol = solve_with_relaxation(DirectionLp{std::move(lp), dim, false, 0}, first, opts);
    res.lp_iterations += sol.iterations;
    if (sol.status != LpStatus::Optimal) continue;
    Vector d = geo.to_direction(norm_postscale(std::span<const double>(sol.x.data(), dim)));
    Vector der = derivatives_of(gradients, d);
    const double eta = *std::min_element(der.begin(), der.end());
    if (res.status == DirectionStatus::SubproblemFailed || eta < res.eta - 1e-12 * (1.0 + std::abs(res.eta))) {
      res.status = DirectionStatus::Descent;
      res.eta = eta;
      res.d = std::move(d);
      res.derivatives = std::move(der);
    }
  }
  finish(res, gradients, opts);
  return res;
}

}  // namespace cmgd
