#pragma once

// Independent reference computations used as test oracles. Nothing here
// calls into the enumeration or product code of the library under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "amgm/matrix.hpp"
#include "amgm/rng.hpp"

namespace oracle {

using amgm::DenseMatrix;

inline DenseMatrix naive_mul(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline DenseMatrix naive_product(const std::vector<DenseMatrix>& ms,
                                 const std::vector<std::size_t>& order) {
  DenseMatrix p = DenseMatrix::identity(ms.front().rows());
  for (std::size_t i : order) p = naive_mul(p, ms[i]);
  return p;
}

inline DenseMatrix naive_power(const DenseMatrix& m, unsigned long long k) {
  DenseMatrix p = DenseMatrix::identity(m.rows());
  for (unsigned long long i = 0; i < k; ++i) p = naive_mul(p, m);
  return p;
}

inline double fact(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

/// Sum over all orderings of the members in `mask`, by dynamic programming
/// over subsets: S(mask) = sum_{j in mask} S(mask \ j) A_j.
inline DenseMatrix subset_dp_permutation_mean(const std::vector<DenseMatrix>& ms) {
  const std::size_t n = ms.size();
  const std::size_t d = ms.front().rows();
  std::vector<DenseMatrix> s(std::size_t{1} << n, DenseMatrix(d, d));
  s[0] = DenseMatrix::identity(d);
  for (std::size_t mask = 1; mask < s.size(); ++mask)
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (std::size_t{1} << j)) s[mask] += naive_mul(s[mask ^ (std::size_t{1} << j)], ms[j]);
  DenseMatrix out = s.back();
  out *= 1.0 / fact(n);
  return out;
}

inline std::vector<std::vector<std::size_t>> all_permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Largest singular value by power iteration on M^T M (many iterations,
/// random start). Adequate as an oracle for well-separated top values.
inline double power_norm(const DenseMatrix& m, int iters = 5000) {
  amgm::Rng rng(12345);
  std::vector<double> v = rng.gaussian_vector(m.cols());
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> w(m.rows(), 0.0), u(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) w[i] += m(i, j) * v[j];
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) u[j] += m(i, j) * w[i];
    double nu = 0.0, nw = 0.0;
    for (double x : u) nu += x * x;
    for (double x : w) nw += x * x;
    if (nu == 0.0) return 0.0;
    nu = std::sqrt(nu);
    for (std::size_t j = 0; j < u.size(); ++j) v[j] = u[j] / nu;
    sigma = std::sqrt(nw);
  }
  return sigma;
}

/// max over sampled complex unit vectors of |v^H M v|: a lower bound on w(M).
inline double sampled_radius(const DenseMatrix& m, int samples, std::uint64_t seed) {
  amgm::Rng rng(seed);
  const std::size_t d = m.rows();
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<std::complex<double>> v(d);
    double nrm = 0.0;
    for (auto& x : v) {
      x = {rng.normal(), rng.normal()};
      nrm += std::norm(x);
    }
    nrm = std::sqrt(nrm);
    for (auto& x : v) x /= nrm;
    std::complex<double> q = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) q += std::conj(v[i]) * m(i, j) * v[j];
    best = std::max(best, std::abs(q));
  }
  return best;
}

/// Largest |eigenvalue| of a symmetric 2 x 2 matrix in closed form.
inline double sym2_norm(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return std::max(std::abs(mean + rad), std::abs(mean - rad));
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace oracle
