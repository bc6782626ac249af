#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "amgm/matrix.hpp"

namespace amgm {

inline constexpr unsigned long long kMaxSgdEpochs = 1'000'000;

/// Least squares F(z) = 1/2 sum_i (x_i^T z - y_i)^2 over unit vectors x_i.
struct RegressionProblem {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::vector<double>> x_vectors;
  std::vector<double> y_labels;
  double eta = 0.0;
  unsigned long long K = 1;
  std::uint64_t seed = 0;
  bool zero_labels = false;

  double loss(std::span<const double> z) const;
};

/// Throws DimensionMismatch / NotUnitVector / NonFinite on malformed input.
void validate_problem(const RegressionProblem& p);

/// x_i ~ N(0, I_d) normalized to unit length, y_i ~ N(0, 1) (or zero).
RegressionProblem gaussian_problem(std::size_t n, std::size_t d, double eta, unsigned long long K,
                                   std::uint64_t seed, bool zero_labels);

enum class Scheme { Gd, Sgd, RandomShuffle, SingleShuffle };
inline constexpr std::array<Scheme, 4> kAllSchemes{Scheme::Gd, Scheme::Sgd, Scheme::RandomShuffle,
                                                   Scheme::SingleShuffle};
std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

struct Trajectory {
  Scheme scheme = Scheme::Gd;
  std::uint64_t seed = 0;
  std::vector<double> losses;      ///< F(z_t), t = 0..nK
  std::vector<double> proj_norms;  ///< ||V prod_{j=t..1} (I - eta x x^T)||, t = 0..nK (may be empty)
  double final_proj_norm = 0.0;
  std::vector<double> final_iterate;
};

/// Component order for every iteration of `scheme` over K epochs, drawn from
/// the stream (seed, scheme). Empty for gd.
std::vector<std::size_t> scheme_schedule(const RegressionProblem& p, Scheme scheme,
                                         std::uint64_t seed);

/// nK iterations. sgd / random_shuffle / single_shuffle step with a single
/// component gradient; gd steps with the averaged gradient (eta/n) sum_i so
/// that its iterate is the with-replacement expected iterate.
Trajectory run_scheme(const RegressionProblem& p, Scheme scheme, std::uint64_t seed,
                      std::span<const double> z0, bool record_proj_norms = true);

/// Final iterate after stepping through an explicit component order.
std::vector<double> run_schedule(const RegressionProblem& p, std::span<const std::size_t> order,
                                 std::span<const double> z0);

/// Orthonormal basis (columns) of span{x_i}: Gram-Schmidt with one
/// re-orthogonalization pass, directions below 1e-12 dropped.
DenseMatrix span_basis(const std::vector<std::vector<double>>& vectors);

struct RunOutcome {
  std::uint64_t run = 0;
  std::uint64_t problem_seed = 0;
  std::array<double, 4> final_loss{};       ///< indexed like kAllSchemes
  std::array<double, 4> final_proj_norm{};
};

struct OrderingSummary {
  std::size_t n = 0;
  std::size_t d = 0;
  double eta = 0.0;
  unsigned long long K = 1;
  std::uint64_t runs = 0;
  std::uint64_t seed = 0;
  bool zero_labels = false;
  std::vector<RunOutcome> outcomes;
  double win_ss_rs = 0.0;   ///< fraction of runs with loss(SS) <= loss(RS)
  double win_rs_sgd = 0.0;
  double win_rs_gd = 0.0;
  double proj_win_ss_rs = 0.0;
  double proj_win_rs_sgd = 0.0;
  double proj_win_rs_gd = 0.0;
  std::array<double, 4> median_final_loss{};
};

/// Per run r: problem from seed derive(seed, r, 0), z0 ~ N(0, I) from
/// derive(seed, r, 1), scheme s driven by derive(seed, r, 2). Results do not
/// depend on `workers`.
OrderingSummary ordering_experiment(std::size_t n, std::size_t d, double eta, unsigned long long K,
                                    std::uint64_t runs, std::uint64_t seed,
                                    bool zero_labels = false, unsigned workers = 1);

/// Seed of the sub-stream (seed, run, slot).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run, std::uint64_t slot);

}  // namespace amgm
