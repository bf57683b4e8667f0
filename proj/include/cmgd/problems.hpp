#pragma once

// Built-in benchmark problems. The toy problem has a known Pareto set; the
// speed-density fit calibrates a three-regime model per regime; the portfolio
// trades return against variance and cost under industry allocation limits.

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cmgd/problem.hpp"

namespace cmgd {

// ---------------------------------------------------------------- toy

/// f1 = 1 - exp(-|x + a|^2), f2 = 1 - exp(-|x - a|^2), a = (1,1,1)/sqrt(3),
/// subject to -1 <= x1 + x2 + x3 <= 1.
ProblemSpec toy_problem();

/// Objective pair at x = t (1,1,1); t must lie in [-1/3, 1/3].
std::pair<double, double> toy_analytic_front(double t);

/// Euclidean distance from x to the segment {t (1,1,1) : |t| <= 1/3}.
double toy_distance_to_pareto_set(std::span<const double> x);

// ---------------------------------------------------------------- speed-density

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpeedDensityRecord {
  double flow = 0.0;
  double density = 0.0;
  double speed = 0.0;
};

struct SpeedDensityDataset {
  std::vector<SpeedDensityRecord> records;
  double max_density = 0.0;
  std::vector<std::string> warnings;  ///< one per skipped line, with its line number
};

/// Whitespace-separated "flow density speed" per line; '#' comments and blank
/// lines are skipped. Malformed lines are skipped with a warning.
SpeedDensityDataset load_speed_density(const std::filesystem::path& path);

/// Writes records with 17 significant digits so that loading is exact.
void save_speed_density(const std::filesystem::path& path, const SpeedDensityDataset& data);

/// Regime parameters (a1, b1, a2, b2, a3, b3); speed in regime r is a_r - b_r rho.
using FdModelParams = std::array<double, 6>;

struct FdBreakpoints {
  double first = 40.0;
  double second = 65.0;
};

/// Regime index 0, 1 or 2 of a density.
int fd_regime(double density, const FdBreakpoints& bp = {});

double fd_model_speed(const FdModelParams& p, double density, const FdBreakpoints& bp = {});

/// Synthetic data from the model plus Gaussian speed noise (speeds clamped
/// at 0). Densities cluster at low values; every regime receives records and
/// the largest density equals max_density.
SpeedDensityDataset synthetic_speed_density(const FdModelParams& params, std::size_t count,
                                            double noise_sigma, std::uint64_t seed,
                                            double max_density = 140.0,
                                            const FdBreakpoints& bp = {});

struct WeightingScheme {
  enum class Kind { Uniform, InverseBinFrequency };
  Kind kind = Kind::InverseBinFrequency;
  double bin_width = 5.0;
};

/// weight_i = N / (count of i's density bin * number of nonempty bins),
/// rescaled to mean 1.
Vector compute_bin_weights(const SpeedDensityDataset& data, double bin_width);

/// The eight affine feasibility rows A p <= b over the parameters.
LinearConstraints fd_constraint_rows(double max_density, const FdBreakpoints& bp = {});

/// Three weighted least-squares objectives, one per regime, under the eight
/// monotonicity and nonnegativity rows. Throws ContractViolation naming an
/// empty regime.
ProblemSpec fd_problem(const SpeedDensityDataset& data, const FdBreakpoints& bp = {},
                       const WeightingScheme& weighting = {});

/// Block-diagonal change of variables P with P^T H_r P = I on each regime's
/// (a_r, b_r) block, H_r = sum_i w_i [1, -rho_i; -rho_i, rho_i^2]. Passing it
/// as DirectionOptions::metric removes the intercept/slope ill-conditioning.
Matrix fd_metric(const SpeedDensityDataset& data, const FdBreakpoints& bp = {},
                 const WeightingScheme& weighting = {});

/// Feasible parameters drawn by sampling decreasing speeds at the regime edges.
FdModelParams fd_random_feasible_params(std::mt19937_64& rng, double max_density,
                                        const FdBreakpoints& bp = {});

// ---------------------------------------------------------------- portfolio

struct PortfolioOptions {
  std::size_t n = 2000;
  std::size_t m = 10;
  std::uint64_t seed = 1;
  double lower = 0.05;  ///< industry minimum share
  double upper = 0.25;  ///< industry maximum share
  double epsilon = 1e-6;
  std::size_t k = 0;  ///< factor count, 0 selects n / 10
};

struct PortfolioInstance {
  std::size_t n = 0;
  std::size_t m = 0;
  Vector returns;
  Vector costs;
  Matrix factors;  ///< n x k; covariance = factors factors^T + epsilon I
  double epsilon = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> industries;  ///< [begin, end) blocks
  Vector industry_lower;
  Vector industry_upper;

  /// x^T Sigma x computed from the factors.
  double risk(std::span<const double> x) const;
  /// Sigma x computed from the factors.
  Vector covariance_times(std::span<const double> x) const;
  /// Dense n x n covariance (for tests and small instances).
  Matrix covariance() const;
};

/// Objectives -r.x, x^T Sigma x and c.x; rows for sum x = 1 (two
/// inequalities) and the industry limits; x >= 0 as variable bounds.
std::pair<ProblemSpec, PortfolioInstance> portfolio_problem(const PortfolioOptions& opts);

/// Feasible allocation: industry totals L + (1 - m L) * Dirichlet(1) (redrawn
/// until each is <= U), split uniformly at random within each industry.
Vector portfolio_random_allocation(const PortfolioInstance& inst, std::mt19937_64& rng);

}  // namespace cmgd
