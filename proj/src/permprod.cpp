#include "amgm/permprod.hpp"

#include <cmath>
#include <string>

#include "amgm/error.hpp"
#include "amgm/matcore.hpp"
#include "amgm/rng.hpp"

namespace amgm {
namespace {

void require_enumerable(const MatrixFamily& family) {
  if (family.size() > kMaxEnumeratedMatrices) {
    throw LabError(ErrorKind::TooManyMatrices,
                   "exact enumeration is capped at n = 10 (got n = " +
                       std::to_string(family.size()) + ")");
  }
}

void require_epochs(unsigned long long K) {
  if (K < 1 || K > kMaxEpochs) throw LabError(ErrorKind::OutOfRange, "K must lie in [1, 1e6]");
}

// base^exp, saturating at limit + 1.
std::uint64_t saturating_power(std::uint64_t base, std::uint64_t exp, std::uint64_t limit) {
  std::uint64_t result = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && result > limit / base) return limit + 1;
    result *= base;
  }
  return result;
}

// Visits every K-tuple drawn with replacement from `pool`, in lexicographic
// order, with the left-to-right product of the chosen matrices.
void for_each_pool_tuple(const std::vector<DenseMatrix>& pool, std::size_t length,
                         const std::function<void(const DenseMatrix&)>& visit) {
  std::vector<DenseMatrix> prefix(length + 1);
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == length) {
      visit(prefix[length]);
      return;
    }
    for (const auto& m : pool) {
      if (depth == 0) {
        prefix[1] = m;
      } else {
        multiply_into(prefix[depth], m, prefix[depth + 1]);
      }
      rec(depth + 1);
    }
  };
  if (length == 0) return;
  rec(0);
}

}  // namespace

std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

MatrixFamily MatrixFamily::make(std::vector<DenseMatrix> members,
                                std::optional<double> eta_window) {
  if (members.empty()) throw LabError(ErrorKind::DimensionMismatch, "family must be non-empty");
  const std::size_t d = members.front().rows();
  for (const auto& m : members) {
    if (!m.is_square() || m.rows() != d || d == 0) {
      throw LabError(ErrorKind::DimensionMismatch, "family members must all be d x d");
    }
    if (!m.all_finite()) throw LabError(ErrorKind::NonFinite, "family member");
    if (!is_symmetric(m, kSymmetryTolerance)) {
      throw LabError(ErrorKind::NotSymmetric, "family members must be symmetric");
    }
  }
  if (eta_window) {
    const double eta = *eta_window;
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw LabError(ErrorKind::OutOfRange, "eta window must lie in [0, 1]");
    }
    const DenseMatrix id = DenseMatrix::identity(d);
    for (const auto& m : members) {
      if (!is_psd(m - (1.0 - eta) * id) || !is_psd(id - m)) {
        throw LabError(ErrorKind::WindowViolation,
                       "member violates (1 - eta) I <= A <= I for eta = " + std::to_string(eta));
      }
    }
  }
  MatrixFamily f;
  f.members_ = std::move(members);
  f.dim_ = d;
  f.eta_window_ = eta_window;
  return f;
}

DenseMatrix MatrixFamily::arithmetic_mean() const {
  DenseMatrix s(dim_, dim_);
  for (const auto& m : members_) s += m;
  s *= 1.0 / static_cast<double>(members_.size());
  return s;
}

void for_each_distinct_tuple(const MatrixFamily& family, std::size_t length,
                             const PermutationVisitor& visit) {
  require_enumerable(family);
  const std::size_t n = family.size();
  if (length > n) throw LabError(ErrorKind::IndexOutOfRange, "tuple length exceeds n");
  if (length == 0) return;

  std::vector<std::size_t> order(length);
  std::vector<bool> used(n, false);
  std::vector<DenseMatrix> prefix(length + 1);

  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == length) {
      visit(std::span<const std::size_t>(order), prefix[length]);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      order[depth] = i;
      if (depth == 0) {
        prefix[1] = family[i];
      } else {
        multiply_into(prefix[depth], family[i], prefix[depth + 1]);
      }
      rec(depth + 1);
      used[i] = false;
    }
  };
  rec(0);
}

std::vector<DenseMatrix> permutation_products(const MatrixFamily& family) {
  std::vector<DenseMatrix> out;
  out.reserve(factorial(family.size()));
  for_each_distinct_tuple(family, family.size(),
                          [&](std::span<const std::size_t>, const DenseMatrix& p) {
                            out.push_back(p);
                          });
  return out;
}

DenseMatrix permutation_mean(const MatrixFamily& family) {
  require_enumerable(family);
  const std::size_t d = family.dim();
  DenseMatrix sum(d, d);
  for_each_distinct_tuple(family, family.size(),
                          [&](std::span<const std::size_t>, const DenseMatrix& p) { sum += p; });
  sum *= 1.0 / static_cast<double>(factorial(family.size()));
  return sum;
}

MeansTriple means_triple(const MatrixFamily& family, unsigned long long K) {
  require_enumerable(family);
  require_epochs(K);
  const std::size_t n = family.size();
  const std::size_t d = family.dim();
  DenseMatrix sum(d, d);
  DenseMatrix sum_powers(d, d);
  for_each_distinct_tuple(family, n, [&](std::span<const std::size_t>, const DenseMatrix& p) {
    sum += p;
    if (K == 1) {
      sum_powers += p;
    } else {
      sum_powers += matrix_power(p, K);
    }
  });
  const double inv = 1.0 / static_cast<double>(factorial(n));
  sum *= inv;
  sum_powers *= inv;

  MeansTriple t;
  t.n = n;
  t.K = K;
  t.w_ss = std::move(sum_powers);
  t.w_rs = K == 1 ? sum : matrix_power(sum, K);
  t.w_gd = matrix_power(family.arithmetic_mean(), static_cast<unsigned long long>(n) * K);
  t.norm_ss = spectral_norm(t.w_ss);
  t.norm_rs = spectral_norm(t.w_rs);
  t.norm_gd = spectral_norm(t.w_gd);
  return t;
}

DenseMatrix elementary_symmetric(const MatrixFamily& family, std::span<const std::size_t> sigma,
                                 std::size_t m) {
  const std::size_t n = family.size();
  const std::size_t d = family.dim();
  if (m > n) throw LabError(ErrorKind::IndexOutOfRange, "e_m needs 0 <= m <= n");
  if (sigma.size() != n) throw LabError(ErrorKind::IndexOutOfRange, "sigma must have n entries");
  std::vector<bool> seen(n, false);
  for (std::size_t s : sigma) {
    if (s >= n || seen[s]) throw LabError(ErrorKind::IndexOutOfRange, "sigma is not a permutation");
    seen[s] = true;
  }

  // e[j] holds e_j over the prefix sigma(1..k); extend by one factor at a time.
  std::vector<DenseMatrix> e(m + 1, DenseMatrix(d, d));
  e[0] = DenseMatrix::identity(d);
  DenseMatrix scratch(d, d);
  for (std::size_t k = 0; k < n; ++k) {
    const DenseMatrix& mk = family[sigma[k]];
    const std::size_t top = std::min(m, k + 1);
    for (std::size_t j = top; j >= 1; --j) {
      multiply_into(e[j - 1], mk, scratch);
      e[j] += scratch;
    }
  }
  return e[m];
}

DenseMatrix elementary_symmetric_mean(const MatrixFamily& family, std::size_t m) {
  require_enumerable(family);
  const std::size_t d = family.dim();
  if (m > family.size()) throw LabError(ErrorKind::IndexOutOfRange, "e_m needs 0 <= m <= n");
  if (m == 0) return DenseMatrix::identity(d);
  DenseMatrix sum(d, d);
  for_each_distinct_tuple(family, m,
                          [&](std::span<const std::size_t>, const DenseMatrix& p) { sum += p; });
  sum *= 1.0 / static_cast<double>(factorial(m));
  return sum;
}

DenseMatrix ewo_mean(const MatrixFamily& family, std::size_t m) {
  require_enumerable(family);
  const std::size_t n = family.size();
  if (m < 1 || m > n) throw LabError(ErrorKind::IndexOutOfRange, "E_wo needs 1 <= m <= n");
  DenseMatrix sum(family.dim(), family.dim());
  for_each_distinct_tuple(family, m,
                          [&](std::span<const std::size_t>, const DenseMatrix& p) { sum += p; });
  sum *= static_cast<double>(factorial(n - m)) / static_cast<double>(factorial(n));
  return sum;
}

DenseMatrix ewr_mean_enumerated(const MatrixFamily& family, std::size_t m) {
  require_enumerable(family);
  if (m < 1) throw LabError(ErrorKind::IndexOutOfRange, "E_wr needs m >= 1");
  const std::uint64_t count = saturating_power(family.size(), m, kMaxWithReplacementTuples);
  if (count > kMaxWithReplacementTuples) {
    throw LabError(ErrorKind::OutOfRange, "n^m exceeds the 1e7 enumeration cap");
  }
  DenseMatrix sum(family.dim(), family.dim());
  for_each_pool_tuple(family.members(), m, [&](const DenseMatrix& p) { sum += p; });
  sum *= 1.0 / static_cast<double>(count);
  return sum;
}

DenseMatrix ewr_mean_power(const MatrixFamily& family, std::size_t m) {
  if (m < 1) throw LabError(ErrorKind::IndexOutOfRange, "E_wr needs m >= 1");
  return matrix_power(family.arithmetic_mean(), m);
}

DenseMatrix ewr_mean(const MatrixFamily& family, std::size_t m) {
  if (m < 1) throw LabError(ErrorKind::IndexOutOfRange, "E_wr needs m >= 1");
  if (family.size() <= kMaxEnumeratedMatrices &&
      saturating_power(family.size(), m, kMaxWithReplacementTuples) <= kMaxWithReplacementTuples) {
    return ewr_mean_enumerated(family, m);
  }
  return ewr_mean_power(family, m);
}

DenseMatrix ewo_symmetrized_mean(const MatrixFamily& family, std::size_t m) {
  require_enumerable(family);
  const std::size_t n = family.size();
  if (m < 1 || m > n) throw LabError(ErrorKind::IndexOutOfRange, "E_wo needs 1 <= m <= n");
  DenseMatrix sum(family.dim(), family.dim());
  for_each_distinct_tuple(family, m, [&](std::span<const std::size_t>, const DenseMatrix& p) {
    // Members are symmetric, so the reversed product is p^T.
    sum += p.transpose() * p;
  });
  sum *= static_cast<double>(factorial(n - m)) / static_cast<double>(factorial(n));
  return sum;
}

DenseMatrix ewr_symmetrized_mean(const MatrixFamily& family, std::size_t m) {
  if (m < 1) throw LabError(ErrorKind::IndexOutOfRange, "E_wr needs m >= 1");
  const std::size_t d = family.dim();
  const double inv_n = 1.0 / static_cast<double>(family.size());
  // Innermost factor is A_{i_1} A_{i_1}; each further index wraps both sides.
  DenseMatrix t = DenseMatrix::identity(d);
  for (std::size_t level = 0; level < m; ++level) {
    DenseMatrix next(d, d);
    for (const auto& a : family.members()) next += a * t * a;
    next *= inv_n;
    t = std::move(next);
  }
  return t;
}

double ewo_norm_mean(const MatrixFamily& family, std::size_t m) {
  require_enumerable(family);
  const std::size_t n = family.size();
  if (m < 1 || m > n) throw LabError(ErrorKind::IndexOutOfRange, "E_wo needs 1 <= m <= n");
  double sum = 0.0;
  for_each_distinct_tuple(family, m, [&](std::span<const std::size_t>, const DenseMatrix& p) {
    sum += spectral_norm(p);
  });
  return sum * static_cast<double>(factorial(n - m)) / static_cast<double>(factorial(n));
}

double ewr_norm_mean(const MatrixFamily& family, std::size_t m) {
  require_enumerable(family);
  if (m < 1) throw LabError(ErrorKind::IndexOutOfRange, "E_wr needs m >= 1");
  const std::uint64_t count = saturating_power(family.size(), m, kMaxWithReplacementTuples);
  if (count > kMaxWithReplacementTuples) {
    throw LabError(ErrorKind::OutOfRange, "n^m exceeds the 1e7 enumeration cap");
  }
  double sum = 0.0;
  for_each_pool_tuple(family.members(), m, [&](const DenseMatrix& p) { sum += spectral_norm(p); });
  return sum / static_cast<double>(count);
}

SymmetrizedMeans symmetrized_means(const MatrixFamily& family, unsigned long long K) {
  require_enumerable(family);
  require_epochs(K);
  const std::size_t n = family.size();
  const std::size_t d = family.dim();
  const double inv = 1.0 / static_cast<double>(factorial(n));
  const auto products = permutation_products(family);

  DenseMatrix left(d, d);
  for (const auto& p : products) {
    const DenseMatrix pk = matrix_power(p, K);
    left += pk.transpose() * pk;
  }
  left *= inv;

  DenseMatrix t = DenseMatrix::identity(d);
  for (unsigned long long k = 0; k < K; ++k) {
    DenseMatrix next(d, d);
    for (const auto& p : products) next += p.transpose() * t * p;
    next *= inv;
    t = std::move(next);
  }
  return {std::move(left), std::move(t)};
}

NormExpectation norm_expectation_means(const MatrixFamily& family, unsigned long long K,
                                       bool symmetrized, std::uint64_t budget,
                                       std::uint64_t seed, std::uint64_t mc_samples) {
  require_enumerable(family);
  require_epochs(K);
  const auto products = permutation_products(family);
  const std::uint64_t perms = products.size();
  const double inv = 1.0 / static_cast<double>(perms);

  auto stacked_norm = [symmetrized](const DenseMatrix& stack) {
    return symmetrized ? spectral_norm(stack.transpose() * stack) : spectral_norm(stack);
  };

  NormExpectation out;
  for (const auto& p : products) out.left += stacked_norm(matrix_power(p, K));
  out.left *= inv;

  const std::uint64_t tuples = saturating_power(perms, K, budget);
  if (tuples <= budget) {
    double sum = 0.0;
    for_each_pool_tuple(products, static_cast<std::size_t>(K),
                        [&](const DenseMatrix& stack) { sum += stacked_norm(stack); });
    out.right = sum / static_cast<double>(tuples);
    out.right_samples = tuples;
    return out;
  }

  if (mc_samples < 2) throw LabError(ErrorKind::OutOfRange, "Monte Carlo needs >= 2 samples");
  // Welford running mean / variance.
  double mean = 0.0, m2 = 0.0;
  DenseMatrix stack, scratch;
  for (std::uint64_t s = 0; s < mc_samples; ++s) {
    Rng rng(seed, {s});
    stack = products[rng.below(perms)];
    for (unsigned long long k = 1; k < K; ++k) {
      multiply_into(stack, products[rng.below(perms)], scratch);
      std::swap(stack, scratch);
    }
    const double x = stacked_norm(stack);
    const double delta = x - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (x - mean);
  }
  out.right = mean;
  out.right_estimated = true;
  out.right_samples = mc_samples;
  out.right_stderr = std::sqrt(m2 / static_cast<double>(mc_samples - 1) /
                               static_cast<double>(mc_samples));
  return out;
}

}  // namespace amgm
