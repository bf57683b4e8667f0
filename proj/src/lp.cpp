#include "cmgd/lp.hpp"

#include <algorithm>
#include <cmath>

#include "cmgd/kernels.hpp"

namespace cmgd {
namespace {

enum class Slot : unsigned char { Basic, AtLower, AtUpper, FreeZero };

class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& lp, const LpOptions& opt);
  LpSolution run();

 private:
  enum class PhaseResult { Optimal, Unbounded, IterationLimit };

  PhaseResult iterate();
  void compute_reduced_costs();
  bool refactor();
  void pivot(std::size_t r, std::size_t q);
  void drive_out_artificials();

  const LpProblem& lp_;
  LpOptions opt_;
  std::size_t k_;  // structural columns
  std::size_t p_;  // rows
  std::size_t n_;  // all columns
  Matrix orig_;    // [A | I | -E] in the original row scaling
  Matrix tab_;     // B^-1 [A | I | -E]
  Vector lo_, up_, x_, cost_, rc_;
  std::vector<Slot> slot_;
  std::vector<std::size_t> basis_;
  std::size_t first_art_;
  double dual_scale_ = 1.0;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  std::size_t max_iterations_;
};

BoundedSimplex::BoundedSimplex(const LpProblem& lp, const LpOptions& opt)
    : lp_(lp), opt_(opt), k_(lp.c.size()), p_(lp.a_ub.rows()) {
  // Nonbasic structural start: zero when the bounds allow it, else the nearer bound.
  Vector xs(k_);
  std::vector<Slot> ss(k_);
  for (std::size_t j = 0; j < k_; ++j) {
    const double l = lp.lower[j], u = lp.upper[j];
    const bool lf = std::isfinite(l), uf = std::isfinite(u);
    if (l < 0.0 && u > 0.0) {
      xs[j] = 0.0;
      ss[j] = Slot::FreeZero;
    } else if (lf && (!uf || std::abs(l) <= std::abs(u))) {
      xs[j] = l;
      ss[j] = Slot::AtLower;
    } else if (uf) {
      xs[j] = u;
      ss[j] = Slot::AtUpper;
    } else {
      xs[j] = 0.0;
      ss[j] = Slot::FreeZero;
    }
  }
  Vector resid(p_);
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < p_; ++i) {
    resid[i] = lp.b_ub[i] - kernels::dot(lp.a_ub.row(i), xs);
    if (resid[i] < 0.0) ++n_art;
  }
  first_art_ = k_ + p_;
  n_ = k_ + p_ + n_art;
  orig_ = Matrix(p_, n_);
  tab_ = Matrix(p_, n_);
  lo_.assign(n_, 0.0);
  up_.assign(n_, kInf);
  x_.assign(n_, 0.0);
  slot_.assign(n_, Slot::AtLower);
  basis_.assign(p_, 0);
  for (std::size_t j = 0; j < k_; ++j) {
    lo_[j] = lp.lower[j];
    up_[j] = lp.upper[j];
    x_[j] = xs[j];
    slot_[j] = ss[j];
  }
  std::size_t art = first_art_;
  for (std::size_t i = 0; i < p_; ++i) {
    auto row = orig_.row(i);
    std::copy(lp.a_ub.row(i).begin(), lp.a_ub.row(i).end(), row.begin());
    row[k_ + i] = 1.0;
    if (resid[i] < 0.0) {
      row[art] = -1.0;
      basis_[i] = art;
      slot_[art] = Slot::Basic;
      x_[art] = -resid[i];
      ++art;
      // Basis column is -e_i, so B^-1 flips the sign of row i.
      auto t = tab_.row(i);
      for (std::size_t j = 0; j < n_; ++j) t[j] = -row[j];
    } else {
      basis_[i] = k_ + i;
      slot_[k_ + i] = Slot::Basic;
      x_[k_ + i] = resid[i];
      std::copy(row.begin(), row.end(), tab_.row(i).begin());
    }
  }
  max_iterations_ = opt.max_iterations ? opt.max_iterations : 50 * (p_ + k_) + 1000;
}

void BoundedSimplex::compute_reduced_costs() {
  rc_ = cost_;
  for (std::size_t i = 0; i < p_; ++i) {
    const double cb = cost_[basis_[i]];
    if (cb != 0.0) kernels::axpy(-cb, tab_.row(i), rc_);
  }
  for (std::size_t i = 0; i < p_; ++i) rc_[basis_[i]] = 0.0;
}

bool BoundedSimplex::refactor() {
  since_refactor_ = 0;
  if (p_ == 0) {
    compute_reduced_costs();
    return true;
  }
  Matrix b(p_, p_);
  for (std::size_t i = 0; i < p_; ++i) {
    for (std::size_t r = 0; r < p_; ++r) b(i, r) = orig_(i, basis_[r]);
  }
  LuFactor lu(std::move(b));
  if (lu.singular()) {
    compute_reduced_costs();
    return false;
  }
  const Matrix inv = lu.inverse();
  for (std::size_t r = 0; r < p_; ++r) {
    auto t = tab_.row(r);
    std::fill(t.begin(), t.end(), 0.0);
    for (std::size_t i = 0; i < p_; ++i) {
      if (inv(r, i) != 0.0) kernels::axpy(inv(r, i), orig_.row(i), t);
    }
  }
  // Basic values from the nonbasic ones: x_B = B^-1 (b - N x_N).
  Vector rhs(lp_.b_ub.begin(), lp_.b_ub.end());
  for (std::size_t j = 0; j < n_; ++j) {
    if (slot_[j] == Slot::Basic || x_[j] == 0.0) continue;
    for (std::size_t i = 0; i < p_; ++i) rhs[i] -= orig_(i, j) * x_[j];
  }
  lu.solve(rhs);
  for (std::size_t r = 0; r < p_; ++r) {
    x_[basis_[r]] = rhs[r];
    tab_(r, basis_[r]) = 1.0;
  }
  compute_reduced_costs();
  return true;
}

void BoundedSimplex::pivot(std::size_t r, std::size_t q) {
  auto prow = tab_.row(r);
  const double inv = 1.0 / prow[q];
  kernels::scale(inv, prow);
  prow[q] = 1.0;
  for (std::size_t i = 0; i < p_; ++i) {
    if (i == r) continue;
    const double f = tab_(i, q);
    if (f != 0.0) {
      kernels::axpy(-f, prow, tab_.row(i));
      tab_(i, q) = 0.0;
    }
  }
  const double f = rc_[q];
  if (f != 0.0) kernels::axpy(-f, prow, rc_);
  rc_[q] = 0.0;
  basis_[r] = q;
  slot_[q] = Slot::Basic;
  ++since_refactor_;
}

BoundedSimplex::PhaseResult BoundedSimplex::iterate() {
  const double dtol = opt_.dual_tol * dual_scale_;
  const std::size_t bland_after = 5 * (p_ + k_);
  std::size_t degenerate_run = 0;
  bool bland = false;
  std::vector<double> col(p_);
  refactor();
  while (true) {
    if (iterations_ >= max_iterations_) return PhaseResult::IterationLimit;
    if (since_refactor_ >= opt_.refactor_interval) refactor();

    // Pricing.
    std::size_t q = n_;
    double dir = 0.0;
    double best = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const Slot s = slot_[j];
      if (s == Slot::Basic || lo_[j] == up_[j]) continue;
      const double d = rc_[j];
      double score = 0.0;
      double jd = 0.0;
      if ((s == Slot::AtLower || s == Slot::FreeZero) && d < -dtol) {
        score = -d;
        jd = 1.0;
      } else if ((s == Slot::AtUpper || s == Slot::FreeZero) && d > dtol) {
        score = d;
        jd = -1.0;
      }
      if (jd == 0.0) continue;
      if (bland) {
        q = j;
        dir = jd;
        break;
      }
      if (score > best) {
        best = score;
        q = j;
        dir = jd;
      }
    }
    if (q == n_) return PhaseResult::Optimal;

    // Ratio test. Basic variable in row i moves at rate -dir * alpha_i.
    for (std::size_t i = 0; i < p_; ++i) col[i] = tab_(i, q);
    double t_min = kInf;
    std::size_t leave = p_;
    double leave_alpha = 0.0;
    bool leave_to_upper = false;
    for (std::size_t i = 0; i < p_; ++i) {
      const double alpha = col[i];
      if (std::abs(alpha) <= opt_.pivot_tol) continue;
      const std::size_t bj = basis_[i];
      const double rate = -dir * alpha;
      double limit;
      bool to_upper;
      if (rate < 0.0) {
        if (!std::isfinite(lo_[bj])) continue;
        limit = (x_[bj] - lo_[bj]) / -rate;
        to_upper = false;
      } else {
        if (!std::isfinite(up_[bj])) continue;
        limit = (up_[bj] - x_[bj]) / rate;
        to_upper = true;
      }
      limit = std::max(limit, 0.0);
      bool take = false;
      if (leave == p_ || limit < t_min - 1e-12 * (1.0 + t_min)) {
        take = true;
      } else if (limit <= t_min + 1e-12 * (1.0 + t_min)) {
        take = bland ? bj < basis_[leave] : std::abs(alpha) > std::abs(leave_alpha);
      }
      if (take) {
        t_min = leave == p_ ? limit : std::min(t_min, limit);
        leave = i;
        leave_alpha = alpha;
        leave_to_upper = to_upper;
      }
    }
    // Distance the entering variable can travel before reaching its own bound.
    const double flip = dir > 0.0 ? up_[q] - x_[q] : x_[q] - lo_[q];
    const bool bound_flip = std::isfinite(flip) && flip <= t_min;
    if (!bound_flip && leave == p_) return PhaseResult::Unbounded;
    const double t = bound_flip ? flip : t_min;

    ++iterations_;
    if (t <= opt_.primal_tol) {
      if (++degenerate_run > bland_after) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    if (t > 0.0) {
      x_[q] += dir * t;
      for (std::size_t i = 0; i < p_; ++i) {
        if (col[i] != 0.0) x_[basis_[i]] -= dir * t * col[i];
      }
    }
    if (bound_flip) {
      slot_[q] = dir > 0.0 ? Slot::AtUpper : Slot::AtLower;
      x_[q] = dir > 0.0 ? up_[q] : lo_[q];
      continue;
    }
    const std::size_t out = basis_[leave];
    pivot(leave, q);
    if (leave_to_upper) {
      slot_[out] = Slot::AtUpper;
      x_[out] = up_[out];
    } else {
      slot_[out] = Slot::AtLower;
      x_[out] = lo_[out];
    }
  }
}

void BoundedSimplex::drive_out_artificials() {
  for (std::size_t r = 0; r < p_; ++r) {
    const std::size_t bj = basis_[r];
    if (bj < first_art_) continue;
    std::size_t best = n_;
    double best_abs = 1e-7;
    for (std::size_t j = 0; j < first_art_; ++j) {
      if (slot_[j] == Slot::Basic || lo_[j] == up_[j]) continue;
      if (std::abs(tab_(r, j)) > best_abs) {
        best_abs = std::abs(tab_(r, j));
        best = j;
      }
    }
    if (best == n_) continue;  // redundant row; the artificial stays basic, fixed at zero
    pivot(r, best);
    slot_[bj] = Slot::AtLower;
    x_[bj] = 0.0;
  }
}

LpSolution BoundedSimplex::run() {
  LpSolution sol;
  cost_.assign(n_, 0.0);
  double art_sum = 0.0;
  for (std::size_t j = first_art_; j < n_; ++j) {
    cost_[j] = 1.0;
    art_sum += x_[j];
  }
  if (n_ > first_art_) {
    dual_scale_ = 1.0;
    const PhaseResult r = iterate();
    double b_scale = 1.0;
    for (double v : lp_.b_ub) b_scale = std::max(b_scale, std::abs(v));
    art_sum = 0.0;
    for (std::size_t j = first_art_; j < n_; ++j) art_sum += std::max(x_[j], 0.0);
    if (r == PhaseResult::IterationLimit) {
      sol.status = LpStatus::IterationLimit;
      sol.iterations = iterations_;
      return sol;
    }
    if (art_sum > opt_.primal_tol * b_scale) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = iterations_;
      return sol;
    }
    for (std::size_t j = first_art_; j < n_; ++j) {
      lo_[j] = up_[j] = 0.0;
      if (slot_[j] != Slot::Basic) {
        slot_[j] = Slot::AtLower;
        x_[j] = 0.0;
      }
    }
    drive_out_artificials();
  }

  std::fill(cost_.begin(), cost_.end(), 0.0);
  std::copy(lp_.c.begin(), lp_.c.end(), cost_.begin());
  dual_scale_ = std::max(1.0, norm_inf(lp_.c));
  const PhaseResult r = iterate();
  sol.iterations = iterations_;
  if (r == PhaseResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  if (r == PhaseResult::IterationLimit) {
    sol.status = LpStatus::IterationLimit;
    return sol;
  }
  refactor();
  sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(k_));
  for (std::size_t j = 0; j < k_; ++j) sol.x[j] = std::clamp(sol.x[j], lp_.lower[j], lp_.upper[j]);
  sol.objective = kernels::dot(lp_.c, sol.x);
  sol.status = lp_violation(lp_, sol.x) <= opt_.exit_tol ? LpStatus::Optimal : LpStatus::Infeasible;
  return sol;
}

}  // namespace

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
    case LpStatus::IterationLimit:
      return "iteration-limit";
  }
  return "?";
}

LpProblem make_lp(Vector c, Vector lower, Vector upper) {
  LpProblem lp;
  const std::size_t k = c.size();
  lp.c = std::move(c);
  lp.lower = std::move(lower);
  lp.upper = std::move(upper);
  lp.a_ub = Matrix(0, k);
  return lp;
}

double lp_violation(const LpProblem& lp, std::span<const double> x) {
  double v = 0.0;
  for (std::size_t i = 0; i < lp.a_ub.rows(); ++i) {
    v = std::max(v, kernels::dot(lp.a_ub.row(i), x) - lp.b_ub[i]);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    v = std::max(v, lp.lower[j] - x[j]);
    v = std::max(v, x[j] - lp.upper[j]);
  }
  return v;
}

LpSolution solve_lp(const LpProblem& lp, const LpOptions& options) {
  const std::size_t k = lp.c.size();
  if (lp.lower.size() != k || lp.upper.size() != k || lp.b_ub.size() != lp.a_ub.rows() ||
      (lp.a_ub.rows() > 0 && lp.a_ub.cols() != k)) {
    throw ContractViolation("solve_lp: inconsistent dimensions");
  }
  auto finite_or_nan = [](const auto& values) {
    return std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); });
  };
  if (finite_or_nan(lp.c) || finite_or_nan(lp.b_ub) || finite_or_nan(lp.a_ub.data()) ||
      finite_or_nan(lp.lower) || finite_or_nan(lp.upper)) {
    throw ContractViolation("solve_lp: NaN in problem data");
  }
  for (double v : lp.c) {
    if (!std::isfinite(v)) throw ContractViolation("solve_lp: cost vector must be finite");
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (lp.lower[j] > lp.upper[j]) {
      LpSolution s;
      s.status = LpStatus::Infeasible;
      return s;
    }
  }
  BoundedSimplex simplex(lp, options);
  return simplex.run();
}

}  // namespace cmgd
