#include <algorithm>
#include <cmath>

#include "cmgd/problems.hpp"

namespace cmgd {
namespace {

const double kShift = 1.0 / std::sqrt(3.0);

Function gaussian_well(double sign, const char* name) {
  // 1 - exp(-|x - sign * a|^2) with a = kShift * (1,1,1).
  auto sq = [sign](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += (v - sign * kShift) * (v - sign * kShift);
    return s;
  };
  Function f;
  f.name = name;
  f.value = [sq](std::span<const double> x) { return 1.0 - std::exp(-sq(x)); };
  f.gradient = [sq, sign](std::span<const double> x) {
    const double e = 2.0 * std::exp(-sq(x));
    Vector g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = e * (x[j] - sign * kShift);
    return g;
  };
  return f;
}

}  // namespace

ProblemSpec toy_problem() {
  LinearConstraints lin{Matrix{{1.0, 1.0, 1.0}, {-1.0, -1.0, -1.0}}, {1.0, 1.0}};
  return ProblemSpec(3, {gaussian_well(-1.0, "f1"), gaussian_well(1.0, "f2")}, std::move(lin));
}

std::pair<double, double> toy_analytic_front(double t) {
  if (!(t >= -1.0 / 3.0 && t <= 1.0 / 3.0)) {
    throw ContractViolation("toy_analytic_front: t must lie in [-1/3, 1/3]");
  }
  return {1.0 - std::exp(-3.0 * (t + kShift) * (t + kShift)),
          1.0 - std::exp(-3.0 * (t - kShift) * (t - kShift))};
}

double toy_distance_to_pareto_set(std::span<const double> x) {
  if (x.size() != 3) throw ContractViolation("toy_distance_to_pareto_set: expects 3 coordinates");
  const double t = std::clamp((x[0] + x[1] + x[2]) / 3.0, -1.0 / 3.0, 1.0 / 3.0);
  double s = 0.0;
  for (double v : x) s += (v - t) * (v - t);
  return std::sqrt(s);
}

}  // namespace cmgd
