#include "cmgd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmgd/kernels.hpp"

namespace cmgd {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
  for (const auto& r : init) {
    append_row(std::span<const double>(r.begin(), r.size()));
  }
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw ContractViolation("Matrix::append_row: row has " + std::to_string(values.size()) +
                            " entries, expected " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw ContractViolation("multiply: dimension mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = kernels::dot(a.row(i), x);
  return y;
}

Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw ContractViolation("multiply_transposed: dimension mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] != 0.0) kernels::axpy(x[i], a.row(i), y);
  }
  return y;
}

LuFactor::LuFactor(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
  const std::size_t n = lu_.rows();
  if (lu_.cols() != n) throw ContractViolation("LuFactor: matrix must be square");
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  double scale = 0.0;
  for (double v : lu_.data()) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-14 * std::max(scale, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        piv = i;
      }
    }
    if (best <= tiny) {
      singular_ = true;
      return;
    }
    if (piv != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(piv).begin());
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) * inv;
      lu_(i, k) = f;
      if (f != 0.0) {
        kernels::axpy(-f, lu_.row(k).subspan(k + 1), lu_.row(i).subspan(k + 1));
      }
    }
  }
}

void LuFactor::solve(std::span<double> b) const {
  const std::size_t n = lu_.rows();
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
    y[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * y[j];
    y[ii] = s / lu_(ii, ii);
  }
  std::copy(y.begin(), y.end(), b.begin());
}

Matrix LuFactor::inverse() const {
  const std::size_t n = lu_.rows();
  Matrix inv(n, n);
  Vector e(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = e[i];
  }
  return inv;
}

}  // namespace cmgd
