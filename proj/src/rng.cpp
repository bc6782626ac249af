#include "amgm/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "amgm/error.hpp"

namespace amgm {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : Rng(seed, {}) {}

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  for (std::uint64_t id : stream) {
    state = key ^ (id + 0x632be59bd9b4e019ULL);
    key = splitmix64(state);
  }
  state = key;
  for (auto& s : s_) s = splitmix64(state);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw LabError(ErrorKind::OutOfRange, "Rng::below bound must be positive");
  // Rejection to remove modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

DenseMatrix Rng::gaussian_matrix(std::size_t rows, std::size_t cols) {
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = normal();
  return m;
}

std::vector<double> Rng::gaussian_vector(std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = normal();
  return v;
}

DenseMatrix random_orthogonal(Rng& rng, std::size_t d) {
  DenseMatrix q;
  bool ok = false;
  while (!ok) {
    q = rng.gaussian_matrix(d, d);
    ok = true;
    // Modified Gram-Schmidt on columns, twice for stability.
    for (std::size_t j = 0; j < d && ok; ++j) {
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < j; ++k) {
          double dot = 0.0;
          for (std::size_t i = 0; i < d; ++i) dot += q(i, k) * q(i, j);
          for (std::size_t i = 0; i < d; ++i) q(i, j) -= dot * q(i, k);
        }
      }
      double norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) norm += q(i, j) * q(i, j);
      norm = std::sqrt(norm);
      if (norm < 1e-8) {
        ok = false;
        break;
      }
      for (std::size_t i = 0; i < d; ++i) q(i, j) /= norm;
    }
  }
  return q;
}

DenseMatrix random_symmetric_with_spectrum(Rng& rng, const std::vector<double>& eigs) {
  const std::size_t d = eigs.size();
  const DenseMatrix q = random_orthogonal(rng, d);
  DenseMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += q(i, k) * eigs[k] * q(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

DenseMatrix random_symmetric(Rng& rng, std::size_t d) {
  DenseMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      const double v = rng.normal();
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

}  // namespace amgm
