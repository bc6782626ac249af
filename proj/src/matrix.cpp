#include "amgm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "amgm/error.hpp"

namespace amgm {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooManyMatrices: return "TooManyMatrices";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::WindowViolation: return "WindowViolation";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::SingularQ: return "SingularQ";
    case ErrorKind::NotUnitVector: return "NotUnitVector";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw LabError(ErrorKind::DimensionMismatch,
                   "entry count " + std::to_string(entries_.size()) + " != " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  if (!all_finite()) throw LabError(ErrorKind::NonFinite, "matrix entries must be finite");
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> copy;
  copy.reserve(rows.size());
  for (const auto& r : rows) copy.emplace_back(r);
  return from_rows(copy);
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw LabError(ErrorKind::DimensionMismatch, "matrix must have at least one entry");
  }
  const std::size_t cols = rows.front().size();
  std::vector<double> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw LabError(ErrorKind::DimensionMismatch, "ragged rows");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return DenseMatrix(rows.size(), cols, std::move(entries));
}

DenseMatrix DenseMatrix::identity(std::size_t d) {
  DenseMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : entries_) s += v * v;
  return std::sqrt(s);
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : entries_) m = std::max(m, std::abs(v));
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](double v) { return std::isfinite(v); });
}

static void require_same_shape(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw LabError(ErrorKind::DimensionMismatch, "operand shapes differ");
  }
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : entries_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs += rhs; }
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs -= rhs; }
DenseMatrix operator*(DenseMatrix lhs, double s) { return lhs *= s; }
DenseMatrix operator*(double s, DenseMatrix rhs) { return rhs *= s; }

void multiply_into(const DenseMatrix& lhs, const DenseMatrix& rhs, DenseMatrix& out) {
  if (lhs.cols() != rhs.rows()) {
    throw LabError(ErrorKind::DimensionMismatch, "inner dimensions differ");
  }
  const std::size_t n = lhs.rows(), k = lhs.cols(), m = rhs.cols();
  if (out.rows() != n || out.cols() != m) out = DenseMatrix(n, m);
  auto o = out.data();
  std::fill(o.begin(), o.end(), 0.0);
  auto a = lhs.data();
  auto b = rhs.data();
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = o.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
}

DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs) {
  DenseMatrix out(lhs.rows(), rhs.cols());
  multiply_into(lhs, rhs, out);
  return out;
}

DenseMatrix matrix_power(const DenseMatrix& m, unsigned long long power) {
  if (!m.is_square()) throw LabError(ErrorKind::NonSquare, "matrix_power needs a square matrix");
  DenseMatrix result = DenseMatrix::identity(m.rows());
  if (power == 0) return result;
  DenseMatrix base = m;
  DenseMatrix scratch(m.rows(), m.rows());
  bool first = true;
  while (true) {
    if (power & 1ULL) {
      if (first) {
        result = base;
        first = false;
      } else {
        multiply_into(result, base, scratch);
        std::swap(result, scratch);
      }
    }
    power >>= 1;
    if (power == 0) break;
    multiply_into(base, base, scratch);
    std::swap(base, scratch);
  }
  return result;
}

std::vector<double> multiply(const DenseMatrix& m, std::span<const double> v) {
  if (m.cols() != v.size()) throw LabError(ErrorKind::DimensionMismatch, "vector length");
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

bool is_symmetric(const DenseMatrix& m, double rel_tol) {
  if (!m.is_square()) return false;
  const double scale = std::max(1.0, m.max_abs());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale) return false;
  return true;
}

}  // namespace amgm
