#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "cmgd/linalg.hpp"

namespace oracle {

/// Closed-form nearest point to the origin on the segment [a, b].
inline cmgd::Vector segment_min_norm(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    num += a[j] * (b[j] - a[j]);
    den += (b[j] - a[j]) * (b[j] - a[j]);
  }
  const double lambda = den > 0.0 ? std::clamp(-num / den, 0.0, 1.0) : 0.0;
  cmgd::Vector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + lambda * (b[j] - a[j]);
  return out;
}

/// Smallest |sum alpha_t p_t| over a grid on the 3-simplex with the given step.
inline double simplex_grid_min_norm(const cmgd::Matrix& p, double step) {
  double g[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p.cols(); ++k) s += p(i, k) * p(j, k);
      g[i][j] = s;
    }
  }
  const int steps = static_cast<int>(std::lround(1.0 / step));
  double best = 1e300;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; i + j <= steps; ++j) {
      const double a[3] = {i * step, j * step, (steps - i - j) * step};
      double q = 0.0;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) q += a[r] * a[c] * g[r][c];
      }
      best = std::min(best, q);
    }
  }
  return std::sqrt(std::max(best, 0.0));
}

/// Indices of points no other point dominates, by direct pairwise comparison.
inline std::vector<std::size_t> non_dominated_indices(const std::vector<cmgd::Vector>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool beaten = false;
    for (std::size_t j = 0; j < pts.size() && !beaten; ++j) {
      if (j == i) continue;
      bool no_worse = true, better = false;
      for (std::size_t t = 0; t < pts[i].size(); ++t) {
        no_worse = no_worse && pts[j][t] <= pts[i][t];
        better = better || pts[j][t] < pts[i][t];
      }
      beaten = no_worse && better;
    }
    if (!beaten) out.push_back(i);
  }
  return out;
}

}  // namespace oracle
