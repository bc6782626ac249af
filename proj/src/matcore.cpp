#include "amgm/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <string>

#include "amgm/error.hpp"
#include "amgm/permprod.hpp"

namespace amgm {
namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalThreshold = 1e-14;

void require_square_finite(const DenseMatrix& m, const char* who) {
  if (!m.is_square() || m.empty()) {
    throw LabError(ErrorKind::NonSquare, std::string(who) + " needs a non-empty square matrix");
  }
  if (!m.all_finite()) throw LabError(ErrorKind::NonFinite, std::string(who) + " input");
}

double off_diagonal_mass(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Eigenvalues only is not worth a separate path at these sizes.
EigenResult jacobi(DenseMatrix a) {
  const std::size_t n = a.rows();
  DenseMatrix v = DenseMatrix::identity(n);
  const double target = kOffDiagonalThreshold * a.frobenius_norm();

  int sweep = 0;
  while (off_diagonal_mass(a) > target) {
    if (++sweep > kMaxSweeps) {
      throw LabError(ErrorKind::NoConvergence, "Jacobi exceeded 100 sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        // Exact zero by construction; keeps the mass monotone.
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  EigenResult result;
  result.eigenvalues.resize(n);
  result.eigenvectors = DenseMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    result.eigenvalues[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) result.eigenvectors(r, c) = v(r, order[c]);
  }
  return result;
}

// G = m m^T, accumulated in a fixed order so that the Gram of m^T^T is
// bit-identical.
DenseMatrix row_gram(const DenseMatrix& m) {
  const std::size_t r = m.rows(), c = m.cols();
  DenseMatrix g(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < r; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < c; ++k) s += m(i, k) * m(j, k);
      g(i, j) = s;
      g(j, i) = s;
    }
  return g;
}

DenseMatrix col_gram(const DenseMatrix& m) {
  const std::size_t r = m.rows(), c = m.cols();
  DenseMatrix g(c, c);
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = i; j < c; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < r; ++k) s += m(k, i) * m(k, j);
      g(i, j) = s;
      g(j, i) = s;
    }
  return g;
}

double largest_gram_eigenvalue(const DenseMatrix& g) {
  return std::max(0.0, jacobi(g).eigenvalues.back());
}

}  // namespace

EigenResult sym_eigen(const DenseMatrix& m) {
  require_square_finite(m, "sym_eigen");
  if (!is_symmetric(m, kSymmetryTolerance)) {
    throw LabError(ErrorKind::NotSymmetric, "sym_eigen input is not symmetric");
  }
  return jacobi(m);
}

double spectral_norm(const DenseMatrix& m) {
  if (!m.all_finite()) throw LabError(ErrorKind::NonFinite, "spectral_norm input");
  if (m.empty()) return 0.0;
  double lambda;
  if (m.rows() < m.cols()) {
    lambda = largest_gram_eigenvalue(row_gram(m));
  } else if (m.rows() > m.cols()) {
    lambda = largest_gram_eigenvalue(col_gram(m));
  } else {
    lambda = std::max(largest_gram_eigenvalue(row_gram(m)), largest_gram_eigenvalue(col_gram(m)));
  }
  return std::sqrt(lambda);
}

double min_eigenvalue(const DenseMatrix& m) { return sym_eigen(m).eigenvalues.front(); }

double max_eigenvalue(const DenseMatrix& m) { return sym_eigen(m).eigenvalues.back(); }

bool is_psd(const DenseMatrix& m, double tol) {
  if (tol < 0.0) throw LabError(ErrorKind::OutOfRange, "PSD tolerance must be >= 0");
  const auto eig = sym_eigen(m);
  const double norm = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
  return eig.eigenvalues.front() >= -tol * std::max(1.0, norm);
}

DenseMatrix commutator_square_sum(const MatrixFamily& family) {
  const std::size_t d = family.dim();
  DenseMatrix total(d, d);
  const auto& ms = family.members();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = 0; j < ms.size(); ++j) {
      if (i == j) continue;
      const DenseMatrix c = ms[i] * ms[j] - ms[j] * ms[i];
      total += c * c;
    }
  }
  return total;
}

double hermitian_slice_norm(const DenseMatrix& m, double theta) {
  const std::size_t d = m.rows();
  const double ct = std::cos(theta), st = std::sin(theta);
  DenseMatrix e(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double re = ct * 0.5 * (m(i, j) + m(j, i));
      const double im = st * 0.5 * (m(i, j) - m(j, i));
      e(i, j) = re;
      e(i + d, j + d) = re;
      e(i, j + d) = -im;
      e(i + d, j) = im;
    }
  }
  const auto eig = jacobi(std::move(e));
  return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

double numerical_radius(const DenseMatrix& m, std::size_t grid) {
  require_square_finite(m, "numerical_radius");
  if (grid < 64) throw LabError(ErrorKind::OutOfRange, "numerical_radius grid must be >= 64");

  const double half_pi = std::numbers::pi / 2.0;
  const double step = half_pi / static_cast<double>(grid - 1);
  double best = -1.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double v = hermitian_slice_norm(m, static_cast<double>(k) * step);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }

  double lo = best_k == 0 ? 0.0 : static_cast<double>(best_k - 1) * step;
  double hi = best_k + 1 >= grid ? half_pi : static_cast<double>(best_k + 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = hermitian_slice_norm(m, x1);
  double f2 = hermitian_slice_norm(m, x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = hermitian_slice_norm(m, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = hermitian_slice_norm(m, x1);
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

}  // namespace amgm
