#pragma once

// Small problem builders shared by the unit tests.

#include <random>

#include "cmgd/problem.hpp"

namespace fixture {

/// Objective g.x with a constant gradient.
inline cmgd::Function linear_objective(cmgd::Vector g) {
  cmgd::Function f;
  f.value = [g](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) s += g[j] * x[j];
    return s;
  };
  f.gradient = [g](std::span<const double>) { return g; };
  return f;
}

/// |x - c|^2.
inline cmgd::Function squared_distance(cmgd::Vector c) {
  cmgd::Function f;
  f.value = [c](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += (x[j] - c[j]) * (x[j] - c[j]);
    return s;
  };
  f.gradient = [c](std::span<const double> x) {
    cmgd::Vector g(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) g[j] = 2.0 * (x[j] - c[j]);
    return g;
  };
  return f;
}

/// One linear objective per gradient row plus optional linear constraints.
inline cmgd::ProblemSpec linear_objectives(const cmgd::Matrix& g, cmgd::LinearConstraints lin = {}) {
  std::vector<cmgd::Function> objs;
  for (std::size_t t = 0; t < g.rows(); ++t) objs.push_back(linear_objective({g.row(t).begin(), g.row(t).end()}));
  if (lin.a.rows() == 0) lin.a = cmgd::Matrix(0, g.cols());
  return cmgd::ProblemSpec(g.cols(), std::move(objs), std::move(lin));
}

inline cmgd::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  cmgd::Matrix m(r, c);
  for (auto& v : m.data()) v = n(rng);
  return m;
}

}  // namespace fixture
