#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

#include "amgm/matrix.hpp"

namespace amgm {

/// xoshiro256** seeded through splitmix64, with a Box-Muller normal
/// transform. Streams are keyed by (seed, ids...) so that every trial, run
/// or sample can be regenerated independently of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

  static constexpr std::string_view kGeneratorName = "xoshiro256**+splitmix64/box-muller";

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  double normal();

  /// Fisher-Yates shuffle of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols);
  std::vector<double> gaussian_vector(std::size_t n);

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-ish random orthogonal matrix from Gram-Schmidt on a Gaussian draw.
DenseMatrix random_orthogonal(Rng& rng, std::size_t d);

/// Q diag(eigs) Q^T with a random orthogonal Q.
DenseMatrix random_symmetric_with_spectrum(Rng& rng, const std::vector<double>& eigs);

/// Symmetric with i.i.d. N(0,1) upper triangle.
DenseMatrix random_symmetric(Rng& rng, std::size_t d);

}  // namespace amgm
