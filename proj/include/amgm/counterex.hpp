#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amgm/inequality.hpp"
#include "amgm/permprod.hpp"

namespace amgm {

enum class CounterexampleSource { AppendixA, DeSa, RandomSearch };
std::string_view source_name(CounterexampleSource s);

struct CounterexampleReport {
  CounterexampleSource source = CounterexampleSource::RandomSearch;
  MatrixFamily family;
  std::size_t n = 0;
  unsigned long long K = 0;
  std::size_t d = 0;
  double eta = 0.0;
  Variant violated_variant = Variant::MainSsRs;
  double margin = 0.0;
  std::optional<std::uint64_t> trial_index;
  std::optional<std::uint64_t> seed;
};

struct SweepRow {
  double eta = 0.0;
  unsigned long long K = 0;
  double norm_ss = 0.0;
  double norm_rs = 0.0;
  double ratio = 0.0;  ///< norm_ss / norm_rs when norm_rs > 0, +inf otherwise
  bool infinite = false;  ///< one-epoch mean norm <= kInfiniteRatioThreshold
};

/// Absolute threshold below which the one-epoch permutation mean counts as zero.
inline constexpr double kInfiniteRatioThreshold = 1e-15;

/// The rank-1 PSD triple with angles 0 and +-60 degrees.
MatrixFamily appendix_a_family();

/// (1 - eta) I + eta A_i over the triple above, window tagged with eta.
MatrixFamily lifted_family(double eta);

/// 1 - 3 eta/2 + 3 eta^2/8 + eta^3/16; the lifted family's one-epoch
/// permutation mean is this scalar times I.
double rs_polynomial(double eta);

/// The root of rs_polynomial inside [0, 1]: -4 + 2 sqrt(6).
double rs_polynomial_root();

/// A_i = I + 1 y_i^T + y_i 1^T in dimension n.
MatrixFamily desa_family(std::size_t n);

/// |(1 + 1/(n-1))^{n/2} cos(n asin(1/sqrt n))| and whether it exceeds 1,
/// which is when desa_family(n) violates the m = n AM-GM inequality.
std::pair<double, bool> desa_criterion(std::size_t n);

/// check_recht_re(m = n) on desa_family(n) with c I added to every member.
InequalityReport perturbation_break_check(std::size_t n, double c,
                                          double tol = kDefaultVerdictTolerance);

struct SearchConfig {
  std::size_t n = 3;
  unsigned long long K = 2;
  std::size_t d = 2;
  double eta = 1.0;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  bool include_variants = true;
  VariantOptions variant_options{};
  double tol = kDefaultVerdictTolerance;
  unsigned workers = 1;
};

/// One random-search trial family: U_i ~ N(0,1)^{d x d} from stream
/// (seed, trial, i), M_i = U U^T / ||U U^T||, A_i = (1 - eta) I + eta M_i.
MatrixFamily random_search_family(std::size_t n, std::size_t d, double eta, std::uint64_t seed,
                                  std::uint64_t trial);

struct SearchResult {
  std::vector<CounterexampleReport> violations;  ///< trial-index order
  std::uint64_t trials = 0;
  std::uint64_t trials_with_violation = 0;
};

/// Randomized counterexample search. Results are independent of `workers`.
SearchResult random_search(const SearchConfig& config);

/// ||W_SS|| / ||W_RS|| over the lifted family for every (K, eta) pair.
std::vector<SweepRow> ratio_sweep(const std::vector<unsigned long long>& K_values,
                                  const std::vector<double>& eta_grid);

SweepRow sweep_point(unsigned long long K, double eta);

}  // namespace amgm
