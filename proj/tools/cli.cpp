#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <system_error>

#include <CLI11.hpp>

#include "cmgd/problems.hpp"
#include "cmgd/report.hpp"
#include "cmgd/user_problem.hpp"

namespace cmgd::cli {
namespace {

// Parameters behind the synthetic speed-density data set.
constexpr FdModelParams kSyntheticFd{65.0, 0.25, 70.0, 0.5, 60.0, 0.4};

struct Setup {
  std::optional<ProblemSpec> problem;
  std::vector<Vector> starts;
  SolveOptions solve;
  std::string label;
};

Setup build_setup(const RunConfig& cfg, std::ostream& err) {
  Setup s;
  s.solve = cfg.solve;
  s.solve.seed = cfg.seed;
  if (cfg.problem == "toy") {
    s.problem = toy_problem();
    s.starts = sample_starts(*s.problem, cfg.starts, box_sampler({-1, -1, -1}, {1, 1, 1}), cfg.seed);
    s.label = "toy";
  } else if (cfg.problem == "fd") {
    SpeedDensityDataset data;
    if (cfg.fd_data == "synthetic") {
      data = synthetic_speed_density(kSyntheticFd, cfg.fd_records, cfg.fd_noise, cfg.seed);
      s.label = "fd synthetic (" + std::to_string(cfg.fd_records) + " records)";
    } else {
      data = load_speed_density(cfg.fd_data);
      for (const auto& w : data.warnings) err << "warning: " << w << '\n';
      s.label = "fd " + cfg.fd_data;
    }
    WeightingScheme weighting;
    if (cfg.weight_bin_width == 0.0) weighting.kind = WeightingScheme::Kind::Uniform;
    else weighting.bin_width = cfg.weight_bin_width;
    s.problem = fd_problem(data, {}, weighting);
    s.solve.direction.metric = std::make_shared<const Matrix>(fd_metric(data, {}, weighting));
    const double max_density = data.max_density;
    s.starts = sample_starts(
        *s.problem, cfg.starts,
        [max_density](std::mt19937_64& rng) {
          const FdModelParams p = fd_random_feasible_params(rng, max_density);
          return Vector(p.begin(), p.end());
        },
        cfg.seed);
  } else if (cfg.problem == "portfolio") {
    PortfolioOptions o;
    o.n = cfg.portfolio_n;
    o.m = cfg.portfolio_m;
    o.seed = cfg.portfolio_seed;
    auto [problem, inst] = portfolio_problem(o);
    s.problem = std::move(problem);
    s.starts = sample_starts(
        *s.problem, cfg.starts,
        [inst = std::move(inst)](std::mt19937_64& rng) { return portfolio_random_allocation(inst, rng); },
        cfg.seed);
    s.label = "portfolio n=" + std::to_string(o.n) + " m=" + std::to_string(o.m);
  } else {
    UserProblem u = load_user_problem(cfg.problem);
    s.problem = std::move(u.problem);
    s.starts = sample_starts(*s.problem, cfg.starts, box_sampler(u.start_lower, u.start_upper), cfg.seed);
    s.label = cfg.problem;
  }
  return s;
}

// Fails early so that a bad directory leaves nothing behind.
std::optional<std::string> check_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return "output directory " + dir.string() + " does not exist";
  const auto probe = dir / ".cmgd-write-probe";
  {
    std::ofstream f(probe);
    if (!f) return "output directory " + dir.string() + " is not writable";
  }
  std::filesystem::remove(probe, ec);
  return std::nullopt;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::string objective_label(const ProblemSpec& p, std::size_t i) {
  const std::string& name = p.objectives()[i].name;
  return name.empty() ? "f" + std::to_string(i + 1) : name;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  if (cfg.starts == 0) {
    err << "error: --starts must be at least 1\n";
    return kExitConfig;
  }
  if (auto problem = check_output_dir(cfg.out)) {
    err << "error: " << *problem << '\n';
    return kExitConfig;
  }

  Setup s;
  try {
    s = build_setup(cfg, err);
  } catch (const std::exception& e) {
    // Unreadable data, malformed problem files, bad sizes and sampling boxes
    // without feasible points all land here.
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Trajectory> runs;
  try {
    runs = multi_start(*s.problem, s.starts, s.solve);
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const ParetoFront front = front_from_trajectories(runs);
  std::size_t stalled = 0;
  for (const auto& r : runs) stalled += r.termination == Termination::Stalled;

  std::ostringstream csv, jsonl;
  write_front_csv(csv, front);
  write_trajectories_jsonl(jsonl, runs);
  write_file(cfg.out / "front.csv", csv.str());
  write_file(cfg.out / "trajectories.jsonl", jsonl.str());
  write_file(cfg.out / "summary.json", summary_json(runs, seconds, front.size(), s.label));

  std::size_t plots = 0;
  if (cfg.plot && !front.empty()) {
    const std::size_t n = s.problem->num_objectives();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        PlotOptions o;
        o.title = s.label;
        o.x_label = objective_label(*s.problem, i);
        o.y_label = objective_label(*s.problem, j);
        if (cfg.problem == "toy") {
          for (int k = 0; k <= 200; ++k) o.overlay.push_back(toy_analytic_front(-1.0 / 3.0 + k / 300.0));
        }
        write_file(cfg.out / ("front_f" + std::to_string(i + 1) + "_f" + std::to_string(j + 1) + ".svg"),
                   emit_plot(front, i, j, o));
        ++plots;
      }
    }
  }

  log << s.label << ": " << runs.size() << " starts, " << front.size() << " front entries, " << stalled
      << " stalled, " << seconds << " s\n";
  log << "wrote front.csv, trajectories.jsonl, summary.json";
  if (plots) log << " and " << plots << " plot" << (plots > 1 ? "s" : "");
  log << " to " << cfg.out.string() << '\n';
  return kExitOk;
}

int cli_main(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  CLI::App app{"Two-stage constrained multi-gradient descent"};
  app.name("cmgd");
  app.require_subcommand(1);
  RunConfig cfg;
  std::string out = cfg.out.string();

  CLI::App* cmd = app.add_subcommand("run", "Multi-start solve; writes the front, trajectories, summary and plots");
  cmd->add_option("--problem", cfg.problem, "toy, fd, portfolio, or a JSON problem file")->capture_default_str();
  cmd->add_option("--starts", cfg.starts, "Number of random feasible starts")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Seed for starts and synthetic data")->capture_default_str();
  cmd->add_option("--m1", cfg.solve.m1, "Min-max stage iteration budget")->capture_default_str();
  cmd->add_option("--m2", cfg.solve.m2, "Min-min stage iteration budget")->capture_default_str();
  cmd->add_option("--tol", cfg.solve.tol, "Stationarity tolerance")->capture_default_str()->check(
      CLI::PositiveNumber);
  cmd->add_option("--out", out, "Existing output directory")->capture_default_str();
  cmd->add_flag("--plot", cfg.plot, "Write an SVG scatter plot per objective pair");
  cmd->add_option("--fd-data", cfg.fd_data, "Speed-density file (flow density speed), or \"synthetic\"")
      ->capture_default_str();
  cmd->add_option("--fd-records", cfg.fd_records, "Records in the synthetic data set")->capture_default_str();
  cmd->add_option("--fd-noise", cfg.fd_noise, "Speed noise sigma of the synthetic data set")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--weight-bin-width", cfg.weight_bin_width, "Density bin width of the fit weights; 0 for uniform")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--portfolio-n,--n", cfg.portfolio_n, "Portfolio asset count")->capture_default_str();
  cmd->add_option("--portfolio-m,--m", cfg.portfolio_m, "Portfolio industry count")->capture_default_str();
  cmd->add_option("--portfolio-seed", cfg.portfolio_seed, "Portfolio instance seed")->capture_default_str();
  cmd->add_option("--eta-lin", cfg.solve.direction.eta_lin, "Step scale of linearised constraints")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--exact-l2", cfg.solve.direction.exact_l2, "Enforce the unit ball exactly in direction subproblems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  cfg.out = out;
  return run(cfg, log, err);
}

}  // namespace cmgd::cli
