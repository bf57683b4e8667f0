#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmgd {

using Vector = std::vector<double>;

/// Raised when a caller breaks a documented precondition (dimension
/// mismatch, out-of-range argument, wrong problem kind).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Dense row-major matrix. Rows are contiguous so they can be handed to the
/// vector kernels as spans.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  /// Appends a row; the first row fixes the column count of an empty matrix.
  void append_row(std::span<const double> values);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Rows of n objective gradients, each of length d.
using GradientMatrix = Matrix;

double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);

/// y = A x
Vector multiply(const Matrix& a, std::span<const double> x);
/// y = A^T x
Vector multiply_transposed(const Matrix& a, std::span<const double> x);

/// Dense LU factorisation with partial pivoting, used by the simplex
/// refactorisation step.
class LuFactor {
 public:
  explicit LuFactor(Matrix a);
  bool singular() const { return singular_; }
  /// Solves A x = b in place.
  void solve(std::span<double> b) const;
  /// Explicit inverse (small matrices only).
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
};

}  // namespace cmgd
