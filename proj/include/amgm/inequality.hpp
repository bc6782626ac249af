#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "amgm/permprod.hpp"

namespace amgm {

enum class Variant {
  MainSsRs,      ///< ||W_SS|| <= ||W_RS||
  MainRsGd,      ///< ||W_RS|| <= ||W_GD||
  RechtReM,      ///< ||E_wo[prod_m]|| <= ||E_wr[prod_m]||
  SymmetrizedM,  ///< symmetrized (reversed * forward) version of the above
  EwoNormM,      ///< E_wo||prod_m|| <= E_wr||prod_m||
  SymSsRs,       ///< symmetrized single-shuffle vs. reshuffle, norm of expectation
  NormSsRs,      ///< expectation-of-norm single-shuffle vs. reshuffle
  NormSymSsRs,   ///< expectation-of-norm, symmetrized
};

/// Stable identifiers written into CSV / JSON output.
std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

inline constexpr double kDefaultVerdictTolerance = 1e-10;

struct InequalityReport {
  Variant variant = Variant::MainSsRs;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< rhs - lhs
  bool holds = false;   ///< margin >= -tolerance
  bool tie = false;     ///< |margin| <= tolerance
  double tolerance = kDefaultVerdictTolerance;
  std::size_t n = 0;
  unsigned long long K = 0;
  std::size_t m = 0;
  std::size_t d = 0;
  std::optional<double> eta_window;
  bool estimated = false;  ///< one side is a Monte Carlo estimate
  double stderr_estimate = 0.0;
};

/// Fills margin / holds / tie from lhs, rhs and tolerance.
InequalityReport make_report(Variant v, double lhs, double rhs, double tol);

/// (main_ss_rs, main_rs_gd) from a single means_triple evaluation.
std::pair<InequalityReport, InequalityReport> check_main(const MatrixFamily& family,
                                                         unsigned long long K,
                                                         double tol = kDefaultVerdictTolerance);

InequalityReport check_recht_re(const MatrixFamily& family, std::size_t m,
                                double tol = kDefaultVerdictTolerance);
InequalityReport check_symmetrized_m(const MatrixFamily& family, std::size_t m,
                                     double tol = kDefaultVerdictTolerance);
InequalityReport check_ewo_norm_m(const MatrixFamily& family, std::size_t m,
                                  double tol = kDefaultVerdictTolerance);

struct VariantOptions {
  std::uint64_t budget = kDefaultTupleBudget;
  std::uint64_t seed = 0;
  std::uint64_t mc_samples = 10'000;
  double tol = kDefaultVerdictTolerance;
};

/// main_ss_rs, sym_ss_rs, norm_ss_rs, norm_sym_ss_rs.
std::vector<InequalityReport> check_all_variants(const MatrixFamily& family,
                                                 unsigned long long K,
                                                 const VariantOptions& options = {});

}  // namespace amgm
