#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "cmgd/kernels.hpp"
#include "cmgd/problems.hpp"

namespace cmgd {

double PortfolioInstance::risk(std::span<const double> x) const {
  const Vector y = multiply_transposed(factors, x);
  return kernels::dot(y, y) + epsilon * kernels::dot(x, x);
}

Vector PortfolioInstance::covariance_times(std::span<const double> x) const {
  Vector out = multiply(factors, multiply_transposed(factors, x));
  kernels::axpy(epsilon, x, out);
  return out;
}

Matrix PortfolioInstance::covariance() const {
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      s(i, j) = s(j, i) = kernels::dot(factors.row(i), factors.row(j)) + (i == j ? epsilon : 0.0);
    }
  }
  return s;
}

std::pair<ProblemSpec, PortfolioInstance> portfolio_problem(const PortfolioOptions& opts) {
  const std::size_t n = opts.n, m = opts.m;
  if (n == 0 || m == 0 || n % m != 0) throw ContractViolation("portfolio_problem: m must divide n");
  if (static_cast<double>(m) * opts.lower > 1.0 || static_cast<double>(m) * opts.upper < 1.0 ||
      opts.lower < 0.0 || opts.lower > opts.upper) {
    throw ContractViolation("portfolio_problem: industry limits must satisfy 0 <= L <= U and m L <= 1 <= m U");
  }
  if (!(opts.epsilon > 0.0)) throw ContractViolation("portfolio_problem: epsilon must be positive");
  const std::size_t k = opts.k == 0 ? std::max<std::size_t>(1, n / 10) : opts.k;

  auto inst = std::make_shared<PortfolioInstance>();
  inst->n = n;
  inst->m = m;
  inst->epsilon = opts.epsilon;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ret(0.05, 0.15), cost(0.01, 0.1), fac(-1.0, 1.0);
  inst->returns.resize(n);
  inst->costs.resize(n);
  for (auto& v : inst->returns) v = ret(rng);
  for (auto& v : inst->costs) v = cost(rng);
  inst->factors = Matrix(n, k);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(k));
  for (auto& v : inst->factors.data()) v = fac(rng) * sigma;
  const std::size_t block = n / m;
  for (std::size_t j = 0; j < m; ++j) inst->industries.emplace_back(j * block, (j + 1) * block);
  inst->industry_lower.assign(m, opts.lower);
  inst->industry_upper.assign(m, opts.upper);

  std::vector<Function> objectives(3);
  objectives[0].name = "neg-return";
  objectives[0].value = [inst](std::span<const double> x) { return -kernels::dot(inst->returns, x); };
  objectives[0].gradient = [inst](std::span<const double>) {
    Vector g = inst->returns;
    for (auto& v : g) v = -v;
    return g;
  };
  objectives[1].name = "risk";
  objectives[1].value = [inst](std::span<const double> x) { return inst->risk(x); };
  objectives[1].gradient = [inst](std::span<const double> x) {
    Vector g = inst->covariance_times(x);
    kernels::scale(2.0, g);
    return g;
  };
  objectives[2].name = "cost";
  objectives[2].value = [inst](std::span<const double> x) { return kernels::dot(inst->costs, x); };
  objectives[2].gradient = [inst](std::span<const double>) { return inst->costs; };

  Matrix a(0, n);
  Vector b;
  Vector row(n, 1.0);
  a.append_row(row);  // sum x <= 1
  b.push_back(1.0);
  for (auto& v : row) v = -1.0;
  a.append_row(row);  // sum x >= 1
  b.push_back(-1.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::fill(row.begin(), row.end(), 0.0);
    const auto [lo, hi] = inst->industries[j];
    for (std::size_t i = lo; i < hi; ++i) row[i] = 1.0;
    a.append_row(row);
    b.push_back(opts.upper);
    for (std::size_t i = lo; i < hi; ++i) row[i] = -1.0;
    a.append_row(row);
    b.push_back(-opts.lower);
  }
  VariableBounds bounds{Vector(n, 0.0), Vector(n, std::numeric_limits<double>::infinity())};
  ProblemSpec spec(n, std::move(objectives), LinearConstraints{std::move(a), std::move(b)}, std::move(bounds));
  return {std::move(spec), *inst};
}

Vector portfolio_random_allocation(const PortfolioInstance& inst, std::mt19937_64& rng) {
  const std::size_t m = inst.m;
  std::exponential_distribution<double> expo(1.0);
  Vector totals(m);
  const double lo_sum = std::accumulate(inst.industry_lower.begin(), inst.industry_lower.end(), 0.0);
  for (int attempt = 0;; ++attempt) {
    double s = 0.0;
    for (auto& v : totals) s += (v = expo(rng));
    bool ok = true;
    for (std::size_t j = 0; j < m; ++j) {
      totals[j] = inst.industry_lower[j] + (1.0 - lo_sum) * totals[j] / s;
      ok = ok && totals[j] <= inst.industry_upper[j];
    }
    if (ok) break;
    if (attempt > 100000) throw ContractViolation("portfolio_random_allocation: industry limits too tight");
  }
  Vector x(inst.n, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto [lo, hi] = inst.industries[j];
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += (x[i] = expo(rng));
    for (std::size_t i = lo; i < hi; ++i) x[i] *= totals[j] / s;
  }
  return x;
}

}  // namespace cmgd
