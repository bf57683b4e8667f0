#include "cmgd/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cmgd/kernels.hpp"

namespace cmgd {
namespace {

Iterate make_iterate(const ProblemSpec& problem, Vector point, double eta, double h, Stage stage,
                     double feas_tol) {
  Iterate it;
  it.objectives = evaluate_objectives(problem, point);
  it.feasibility = check_feasibility(problem, point, feas_tol).max_violation;
  it.point = std::move(point);
  it.eta = eta;
  it.h = h;
  it.stage = stage;
  return it;
}

struct StageOutcome {
  bool certified = false;
  bool stalled = false;
  bool failed = false;
  double eta = 0.0;
  std::size_t steps = 0;
};

constexpr std::size_t kCurvatureRounds = 8;

// A min-min direction holds some derivatives at zero. If such an objective
// curves upward along d, its derivative turns positive at once and no monotone
// step exists. Probe a short way along d; for each objective already rising
// there, take the gradient change (about H d) and require it to be orthogonal
// to the next direction. For a quadratic, rank(H) rounds confine the
// direction to the subspace where that objective is flat.
DirectionResult avoid_upward_curvature(const ProblemSpec& problem, const Vector& x, DirectionResult dir,
                                       const DirectionOptions& dopts) {
  const std::size_t dim = x.size();
  const GradientMatrix g = evaluate_gradients(problem, x);
  auto rows = std::make_shared<Matrix>(0, dim);
  Vector current = dir.d;
  for (std::size_t round = 0; round < std::min<std::size_t>(dim, kCurvatureRounds); ++round) {
    const double scale = norm_inf(current);
    const double dn = norm2(current);
    const double tau = 1e-6 * (1.0 + norm_inf(x)) / scale;
    Vector probe(x);
    kernels::axpy(tau, current, probe);
    const GradientMatrix gp = evaluate_gradients(problem, probe);
    const std::size_t before = rows->rows();
    for (std::size_t t = 0; t < g.rows(); ++t) {
      if (kernels::dot(gp.row(t), current) - 1e-12 * norm2(gp.row(t)) * dn <= 0.0) continue;
      Vector hd(dim);
      for (std::size_t j = 0; j < dim; ++j) hd[j] = gp(t, j) - g(t, j);
      const double nrm = norm2(hd);
      if (!(nrm > 0.0)) continue;
      kernels::scale(1.0 / nrm, hd);
      rows->append_row(hd);
    }
    if (rows->rows() == before) return dir;
    DirectionOptions cut = dopts;
    cut.null_rows = rows;
    DirectionResult next = stage2_direction(problem, x, g, cut);
    if (next.status != DirectionStatus::Descent) break;
    next.eta = dir.eta;  // the certificate stays that of the uncut subproblem
    dir = std::move(next);
    current = dir.d;
  }
  return dir;
}

StageOutcome run_stage(const ProblemSpec& problem, Stage stage, std::size_t budget,
                       const SolveOptions& opts, const DirectionOptions& dopts, const StepOptions& sopts,
                       Trajectory& traj) {
  auto direction = [&](const Vector& x) {
    const GradientMatrix g = evaluate_gradients(problem, x);
    return stage == Stage::MinMax ? stage1_direction(problem, x, g, dopts)
                                  : stage2_direction(problem, x, g, dopts);
  };
  StageOutcome out;
  std::size_t short_steps = 0;
  while (true) {
    const Vector x = traj.iterates.back().point;
    const DirectionResult dir = direction(x);
    out.eta = dir.eta;
    if (dir.status == DirectionStatus::SubproblemFailed) {
      out.failed = true;
      traj.diagnostics = std::string(to_string(stage)) + " subproblem failed after " +
                         std::to_string(out.steps) + " steps";
      return out;
    }
    if (dir.status == DirectionStatus::Stationary) {
      out.certified = true;
      return out;
    }
    if (out.steps >= budget || short_steps >= opts.stall_steps) {
      out.stalled = short_steps >= opts.stall_steps;
      return out;
    }
    const DirectionResult chosen =
        stage == Stage::MinMin ? avoid_upward_curvature(problem, x, dir, dopts) : dir;
    StepResult step = monotone_step(problem, x, chosen.d, sopts);
    const Vector* w = &chosen.d;
    DirectionResult fallback;
    if (step.h <= sopts.h_min && stage == Stage::MinMin) {
      // A min-max step lowers every objective, so the min-min residual keeps shrinking.
      DirectionOptions strict = dopts;
      strict.stationarity_tol = 0.0;
      fallback = stage1_direction(problem, x, evaluate_gradients(problem, x), strict);
      if (fallback.status == DirectionStatus::Descent) {
        step = monotone_step(problem, x, fallback.d, sopts);
        w = &fallback.d;
      }
    }
    ++out.steps;
    if (step.h <= sopts.h_min) {
      ++short_steps;
      continue;
    }
    short_steps = 0;
    Vector next(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) next[j] = x[j] + step.h * (*w)[j];
    traj.iterates.push_back(make_iterate(problem, std::move(next), dir.eta, step.h, stage, opts.feas_tol));
  }
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::WeakStationaryThenStationary: return "weak-stationary-then-stationary";
    case Termination::MaxIterStage1: return "max-iter-stage1";
    case Termination::MaxIterStage2: return "max-iter-stage2";
    case Termination::Stalled: return "stalled";
  }
  return "?";
}

Trajectory two_stage_solve(const ProblemSpec& problem, std::span<const double> x0, const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) throw ContractViolation("two_stage_solve: tol must be positive");
  const auto report = check_feasibility(problem, x0, opts.feas_tol);
  if (!report.is_feasible) {
    throw ContractViolation("two_stage_solve: start violates constraints by " +
                            std::to_string(report.max_violation));
  }
  DirectionOptions dopts = opts.direction;
  dopts.stationarity_tol = opts.tol;
  dopts.feas_tol = opts.feas_tol;
  StepOptions sopts = opts.step;
  sopts.feas_tol = opts.feas_tol;

  Trajectory traj;
  traj.iterates.push_back(make_iterate(problem, Vector(x0.begin(), x0.end()), 0.0, 0.0, Stage::MinMax, opts.feas_tol));

  const StageOutcome s1 = run_stage(problem, Stage::MinMax, opts.m1, opts, dopts, sopts, traj);
  traj.stage1_steps = s1.steps;
  traj.stage1_certified = s1.certified;
  traj.stage1_eta = s1.eta;
  if (s1.failed) {
    traj.termination = Termination::Stalled;
    return traj;
  }
  const StageOutcome s2 = run_stage(problem, Stage::MinMin, opts.m2, opts, dopts, sopts, traj);
  traj.stage2_steps = s2.steps;
  traj.stage2_certified = s2.certified;
  traj.stage2_eta = s2.eta;

  if (s2.certified) traj.termination = Termination::WeakStationaryThenStationary;
  else if (s1.stalled || s2.stalled || s2.failed) traj.termination = Termination::Stalled;
  else if (!s1.certified) traj.termination = Termination::MaxIterStage1;
  else traj.termination = Termination::MaxIterStage2;
  if (s1.stalled && traj.diagnostics.empty()) traj.diagnostics = "min-max stage stalled on short steps";
  if (s2.stalled && traj.diagnostics.empty()) traj.diagnostics = "min-min stage stalled on short steps";
  return traj;
}

StartSampler box_sampler(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw ContractViolation("box_sampler: bound lengths differ");
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!(lower[j] <= upper[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
      throw ContractViolation("box_sampler: box must be finite and ordered");
    }
  }
  return [lower = std::move(lower), upper = std::move(upper)](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x(lower.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = lower[j] + (upper[j] - lower[j]) * unit(rng);
    return x;
  };
}

std::vector<Vector> sample_starts(const ProblemSpec& problem, std::size_t count, const StartSampler& sampler,
                                  std::uint64_t seed, double feas_tol) {
  constexpr std::size_t kMaxDraws = 100000;
  std::vector<Vector> starts;
  starts.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    std::mt19937_64 rng(seq);
    Vector worst_point;
    double worst_violation = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t draw = 0; draw < kMaxDraws && !found; ++draw) {
      Vector x = sampler(rng);
      const auto rep = check_feasibility(problem, x, feas_tol);
      if (rep.is_feasible) {
        starts.push_back(std::move(x));
        found = true;
      } else if (rep.max_violation < worst_violation) {
        worst_violation = rep.max_violation;
        worst_point = std::move(x);
      }
    }
    if (found) continue;
    // Name the constraint that is most violated at the least-bad draw.
    const std::size_t m = problem.num_constraints();
    std::string name;
    double biggest = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double v = problem.constraint_value(i, worst_point);
      if (v > biggest) {
        biggest = v;
        name = problem.constraints()[i].name.empty() ? "constraint " + std::to_string(i)
                                                     : problem.constraints()[i].name;
      }
    }
    if (const auto& b = problem.bounds()) {
      for (std::size_t j = 0; j < worst_point.size(); ++j) {
        const double v = std::max(b->lower[j] - worst_point[j], worst_point[j] - b->upper[j]);
        if (v > biggest) {
          biggest = v;
          name = "bound on x" + std::to_string(j);
        }
      }
    }
    throw std::runtime_error("no feasible start found in " + std::to_string(kMaxDraws) + " draws for start " +
                             std::to_string(s) + "; most violated: " + name + " (by " +
                             std::to_string(biggest) + ")");
  }
  return starts;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CMGD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) workers = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(workers, jobs));
}

std::vector<Trajectory> multi_start(const ProblemSpec& problem, const std::vector<Vector>& starts,
                                    const SolveOptions& opts) {
  std::vector<Trajectory> out(starts.size());
  if (starts.empty()) return out;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      try {
        out[i] = two_stage_solve(problem, starts[i], opts);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t workers = worker_count(starts.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace cmgd
