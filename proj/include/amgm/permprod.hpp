#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "amgm/matrix.hpp"

namespace amgm {

inline constexpr std::size_t kMaxEnumeratedMatrices = 10;
inline constexpr unsigned long long kMaxEpochs = 1'000'000;
inline constexpr std::uint64_t kDefaultTupleBudget = 1'000'000;
inline constexpr std::uint64_t kMaxWithReplacementTuples = 10'000'000;

/// Ordered tuple (A_1, ..., A_n) of symmetric d x d matrices, optionally
/// tagged with a conditioning window (1 - eta) I <= A_i <= I.
class MatrixFamily {
 public:
  MatrixFamily() = default;

  /// Validates shape, symmetry (1e-12 relative) and, when given, the window.
  static MatrixFamily make(std::vector<DenseMatrix> members,
                           std::optional<double> eta_window = std::nullopt);

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<DenseMatrix>& members() const noexcept { return members_; }
  const DenseMatrix& operator[](std::size_t i) const { return members_[i]; }
  std::optional<double> eta_window() const noexcept { return eta_window_; }

  /// (1/n) sum A_i
  DenseMatrix arithmetic_mean() const;

 private:
  std::vector<DenseMatrix> members_;
  std::size_t dim_ = 0;
  std::optional<double> eta_window_;
};

struct MeansTriple {
  DenseMatrix w_ss;
  DenseMatrix w_rs;
  DenseMatrix w_gd;
  double norm_ss = 0.0;
  double norm_rs = 0.0;
  double norm_gd = 0.0;
  std::size_t n = 0;
  unsigned long long K = 0;
};

using PermutationVisitor =
    std::function<void(std::span<const std::size_t> order, const DenseMatrix& product)>;

/// Visits every ordered tuple of `length` distinct indices in lexicographic
/// order together with the left-to-right product A_{i1} ... A_{im}. Prefix
/// products are shared between siblings. length == n visits S_n.
void for_each_distinct_tuple(const MatrixFamily& family, std::size_t length,
                             const PermutationVisitor& visit);

/// All n! products prod_i A_{sigma(i)}, sigma in lexicographic order.
std::vector<DenseMatrix> permutation_products(const MatrixFamily& family);

/// (1/n!) sum_sigma prod_i A_{sigma(i)}, summed sequentially in lexicographic
/// order. TooManyMatrices beyond n = 10.
DenseMatrix permutation_mean(const MatrixFamily& family);

/// W_SS, W_RS, W_GD for K epochs and their spectral norms.
MeansTriple means_triple(const MatrixFamily& family, unsigned long long K);

/// Noncommutative elementary symmetric polynomial e_m(sigma): the sum over
/// i_1 < ... < i_m of M_{sigma(i_1)} ... M_{sigma(i_m)}; e_0 = I.
DenseMatrix elementary_symmetric(const MatrixFamily& family, std::span<const std::size_t> sigma,
                                 std::size_t m);

/// Mean of e_m(sigma) over S_n, computed as (1/m!) times the sum over
/// ordered tuples of m distinct indices.
DenseMatrix elementary_symmetric_mean(const MatrixFamily& family, std::size_t m);

/// Without-replacement expectation of the m-fold product.
DenseMatrix ewo_mean(const MatrixFamily& family, std::size_t m);

/// With-replacement expectation of the m-fold product. Enumerates [n]^m when
/// n^m <= 1e7, otherwise returns ((1/n) sum A_i)^m.
DenseMatrix ewr_mean(const MatrixFamily& family, std::size_t m);
DenseMatrix ewr_mean_enumerated(const MatrixFamily& family, std::size_t m);
DenseMatrix ewr_mean_power(const MatrixFamily& family, std::size_t m);

/// E_wo / E_wr of (prod_{j=m..1} A_{i_j})(prod_{j=1..m} A_{i_j}).
DenseMatrix ewo_symmetrized_mean(const MatrixFamily& family, std::size_t m);
DenseMatrix ewr_symmetrized_mean(const MatrixFamily& family, std::size_t m);

/// E_wo / E_wr of ||prod_{j=1..m} A_{i_j}||. The with-replacement side is
/// enumerated and refuses n^m > 1e7.
double ewo_norm_mean(const MatrixFamily& family, std::size_t m);
double ewr_norm_mean(const MatrixFamily& family, std::size_t m);

struct SymmetrizedMeans {
  DenseMatrix left;   ///< E_sigma[(P_sigma^T)^K P_sigma^K]
  DenseMatrix right;  ///< E_{sigma_1..K}[stack^T stack], stack = P_{s1} ... P_{sK}
};

/// Symmetrized single-shuffle vs. reshuffle means. The right side uses the
/// epoch recursion T_1 = E[P^T P], T_{k+1} = E[P^T T_k P].
SymmetrizedMeans symmetrized_means(const MatrixFamily& family, unsigned long long K);

struct NormExpectation {
  double left = 0.0;
  double right = 0.0;
  bool right_estimated = false;  ///< Monte Carlo rather than exact enumeration
  double right_stderr = 0.0;
  std::uint64_t right_samples = 0;
};

/// Expectation-of-norm versions. left = E_sigma ||P^K|| (or ||(P^T)^K P^K||
/// when symmetrized); right = E over K independent permutations of the
/// stacked product's norm (or of stack^T stack). The right side is exact
/// when (n!)^K <= budget and otherwise a Monte Carlo estimate whose sample s
/// draws its K permutations from the stream (seed, s).
NormExpectation norm_expectation_means(const MatrixFamily& family, unsigned long long K,
                                       bool symmetrized,
                                       std::uint64_t budget = kDefaultTupleBudget,
                                       std::uint64_t seed = 0,
                                       std::uint64_t mc_samples = 10'000);

std::uint64_t factorial(std::size_t n);

}  // namespace amgm
