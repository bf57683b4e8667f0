#include "cmgd/mgda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmgd/kernels.hpp"

namespace cmgd {
namespace {

Matrix gram(const GradientMatrix& p) {
  const std::size_t n = p.rows();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      m(i, j) = m(j, i) = kernels::dot(p.row(i), p.row(j));
    }
  }
  return m;
}

Vector gram_times(const Matrix& m, std::span<const double> alpha) { return multiply(m, alpha); }

// Minimiser of |sum beta_t p_t|^2 over the affine hull of `support`.
bool affine_minimiser(const Matrix& m, const std::vector<std::size_t>& support, Vector& beta) {
  const std::size_t s = support.size();
  Matrix kkt(s + 1, s + 1);
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = 0; b < s; ++b) kkt(a, b) = m(support[a], support[b]);
    kkt(a, s) = kkt(s, a) = 1.0;
  }
  LuFactor lu(std::move(kkt));
  if (lu.singular()) return false;
  Vector rhs(s + 1, 0.0);
  rhs[s] = 1.0;
  lu.solve(rhs);
  beta.assign(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(s));
  for (double v : beta) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double quad(const Matrix& m, const Vector& alpha) { return kernels::dot(alpha, gram_times(m, alpha)); }

// Wolfe's active-set iteration started from alpha. Finishes in finitely many
// corrections and turns an approximate Frank-Wolfe answer into an exact face
// minimiser. Leaves alpha unchanged if the face systems become singular.
void active_set_refine(const Matrix& m, Vector& alpha, double tol) {
  const std::size_t n = alpha.size();
  Vector cur = alpha;
  for (std::size_t major = 0; major < 4 * n + 10; ++major) {
    const Vector ma = gram_times(m, cur);
    const double q = kernels::dot(cur, ma);
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (ma[i] < ma[j]) j = i;
    }
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i) {
      if (cur[i] > 0.0) support.push_back(i);
    }
    const bool optimal_face = q - ma[j] <= tol;
    if (optimal_face && major > 0) break;
    if (!optimal_face && cur[j] == 0.0) support.push_back(j);
    for (std::size_t minor = 0; minor <= n; ++minor) {
      Vector beta;
      if (!affine_minimiser(m, support, beta)) return;
      double step = 1.0;
      std::size_t drop = support.size();
      for (std::size_t a = 0; a < support.size(); ++a) {
        if (beta[a] <= 0.0) {
          const double ca = cur[support[a]];
          const double t = ca / (ca - beta[a]);
          if (t < step) {
            step = t;
            drop = a;
          }
        }
      }
      for (std::size_t a = 0; a < support.size(); ++a) {
        double& c = cur[support[a]];
        c += step * (beta[a] - c);
        if (c < 0.0) c = 0.0;
      }
      if (drop == support.size()) break;
      cur[support[drop]] = 0.0;
      support.erase(support.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    double total = 0.0;
    for (double v : cur) total += v;
    for (auto& v : cur) v /= total;
  }
  if (quad(m, cur) <= quad(m, alpha) + 1e-15) alpha = std::move(cur);
}

}  // namespace

double wolfe_gap(std::span<const double> x, const GradientMatrix& points) {
  if (points.rows() == 0 || points.cols() != x.size()) {
    throw ContractViolation("wolfe_gap: dimension mismatch");
  }
  const double nsq = kernels::dot(x, x);
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < points.rows(); ++j) lowest = std::min(lowest, kernels::dot(x, points.row(j)));
  return std::max(nsq - lowest, 0.0);
}

bool wolfe_certificate(std::span<const double> x, const GradientMatrix& points, double tol) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  const double nsq = kernels::dot(x, x);
  for (std::size_t j = 0; j < points.rows(); ++j) {
    if (kernels::dot(x, points.row(j)) < nsq - tol) return false;
  }
  return true;
}

MinNormResult min_norm_point(const GradientMatrix& gradients, double tol, std::size_t max_iter) {
  const std::size_t n = gradients.rows();
  const std::size_t d = gradients.cols();
  if (n == 0) throw ContractViolation("min_norm_point: need at least one gradient");
  for (double v : gradients.data()) {
    if (!std::isfinite(v)) throw ContractViolation("min_norm_point: non-finite gradient entry");
  }
  if (max_iter == 0) max_iter = std::max<std::size_t>(100, 10 * n * d);

  const Matrix m = gram(gradients);
  MinNormResult res;
  res.alpha.assign(n, 0.0);
  std::size_t start = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (m(j, j) < m(start, start)) start = j;
  }
  res.alpha[start] = 1.0;
  Vector ma = gram_times(m, res.alpha);

  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    if (it > 0 && it % 50 == 0) ma = gram_times(m, res.alpha);
    const double q = kernels::dot(res.alpha, ma);
    std::size_t s = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (ma[j] < ma[s]) s = j;
    }
    const double fw_gap = q - ma[s];
    if (fw_gap <= tol) break;
    std::size_t a = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (res.alpha[j] > 0.0 && (a == n || ma[j] > ma[a])) a = j;
    }
    const double away_gap = ma[a] - q;
    Vector md(n);
    double slope, curvature, gamma_max;
    bool away = false;
    if (fw_gap >= away_gap) {
      for (std::size_t i = 0; i < n; ++i) md[i] = m(i, s) - ma[i];
      slope = -fw_gap;
      curvature = m(s, s) - 2.0 * ma[s] + q;
      gamma_max = 1.0;
    } else {
      away = true;
      for (std::size_t i = 0; i < n; ++i) md[i] = ma[i] - m(i, a);
      slope = -away_gap;
      curvature = q - 2.0 * ma[a] + m(a, a);
      gamma_max = res.alpha[a] / (1.0 - res.alpha[a]);
    }
    double gamma = curvature > 0.0 ? std::min(-slope / curvature, gamma_max) : gamma_max;
    gamma = std::max(gamma, 0.0);
    if (away) {
      for (std::size_t i = 0; i < n; ++i) res.alpha[i] *= (1.0 + gamma);
      res.alpha[a] -= gamma;
      if (gamma == gamma_max) res.alpha[a] = 0.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) res.alpha[i] *= (1.0 - gamma);
      res.alpha[s] += gamma;
    }
    for (auto& v : res.alpha) v = std::max(v, 0.0);
    kernels::axpy(gamma, md, ma);
  }
  res.iterations = it;

  auto finish = [&](const Vector& alpha) {
    double total = 0.0;
    for (double v : alpha) total += v;
    Vector a = alpha;
    for (auto& v : a) v /= total;
    Vector w(d, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      if (a[t] != 0.0) kernels::axpy(a[t], gradients.row(t), w);
    }
    return std::pair{a, w};
  };
  active_set_refine(m, res.alpha, tol);
  auto [alpha, w] = finish(res.alpha);
  res.alpha = std::move(alpha);
  res.w = std::move(w);
  res.norm_sq = kernels::dot(res.w, res.w);
  res.certificate_ok = wolfe_certificate(res.w, gradients, tol);
  return res;
}

ConstrainedHullResult constrained_segment_min_norm(const GradientMatrix& two_gradients,
                                                   const Matrix& a, std::span<const double> b,
                                                   std::span<const double> theta, double step) {
  if (two_gradients.rows() != 2) throw ContractViolation("constrained_segment_min_norm: need two gradients");
  const std::size_t d = two_gradients.cols();
  if (theta.size() != d || (a.rows() > 0 && a.cols() != d) || b.size() != a.rows()) {
    throw ContractViolation("constrained_segment_min_norm: dimension mismatch");
  }
  const auto p1 = two_gradients.row(0);
  const auto p2 = two_gradients.row(1);
  Vector diff(d);
  for (std::size_t j = 0; j < d; ++j) diff[j] = p2[j] - p1[j];

  // Row i: a.(theta - step (p1 + lambda diff)) <= b  <=>  lambda * coef <= rhs.
  double lo = 0.0, hi = 1.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double coef = -step * kernels::dot(a.row(i), diff);
    const double rhs = b[i] - kernels::dot(a.row(i), theta) + step * kernels::dot(a.row(i), p1);
    if (std::abs(coef) < 1e-15) {
      if (rhs < -1e-12) return {};
      continue;
    }
    if (coef > 0.0) {
      hi = std::min(hi, rhs / coef);
    } else {
      lo = std::max(lo, rhs / coef);
    }
  }
  if (lo > hi + 1e-12) return {};

  const double dd = kernels::dot(diff, diff);
  double lambda = dd > 0.0 ? -kernels::dot(p1, diff) / dd : 0.0;
  lambda = std::clamp(lambda, lo, std::max(lo, hi));
  ConstrainedHullResult out;
  out.feasible = true;
  out.lambda = lambda;
  out.hull_point.resize(d);
  for (std::size_t j = 0; j < d; ++j) out.hull_point[j] = p1[j] + lambda * diff[j];
  return out;
}

ConstrainedHullCounterexample constrained_hull_counterexample() {
  ConstrainedHullCounterexample f;
  f.gradients = Matrix{{-1.0, 2.0}, {3.0, 1.0}};
  // The boundary a.theta = 0 passes through theta = 0 and admits only the
  // hull points with lambda >= 0.9, cutting off the unconstrained minimum at
  // lambda = 6/17.
  f.a = Matrix{{1.1, -2.6}};
  f.b = {0.0};
  f.theta = {0.0, 0.0};
  f.step = 1.0;
  const auto hull = constrained_segment_min_norm(f.gradients, f.a, f.b, f.theta, f.step);
  f.direction = hull.hull_point;
  for (auto& v : f.direction) v = -v;
  return f;
}

}  // namespace cmgd
