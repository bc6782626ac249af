#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace amgm {

/// Row-major dense real matrix. Small (d <= ~30) by intent; no expression
/// templates, no aliasing tricks.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  /// Throws NonFinite / DimensionMismatch on ragged or non-finite input.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static DenseMatrix identity(std::size_t d);
  static DenseMatrix diagonal(std::span<const double> diag);
  static DenseMatrix diagonal(std::initializer_list<double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return entries_; }
  std::span<double> data() noexcept { return entries_; }

  DenseMatrix transpose() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  DenseMatrix& operator+=(const DenseMatrix& rhs);
  DenseMatrix& operator-=(const DenseMatrix& rhs);
  DenseMatrix& operator*=(double s);

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator*(DenseMatrix lhs, double s);
DenseMatrix operator*(double s, DenseMatrix rhs);
DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs);

/// out = lhs * rhs; `out` must not alias either operand. Reuses out's storage.
void multiply_into(const DenseMatrix& lhs, const DenseMatrix& rhs, DenseMatrix& out);

/// Binary exponentiation; power 0 yields the identity.
DenseMatrix matrix_power(const DenseMatrix& m, unsigned long long power);

std::vector<double> multiply(const DenseMatrix& m, std::span<const double> v);

/// Largest entrywise absolute difference.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

bool is_symmetric(const DenseMatrix& m, double rel_tol);

}  // namespace amgm
