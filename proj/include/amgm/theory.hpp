#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "amgm/inequality.hpp"
#include "amgm/permprod.hpp"
#include "amgm/rng.hpp"

namespace amgm {

// ---- Degree-4 expansion of W_RS - W_SS for A_i = I - eta M_i -------------

struct ExpansionCheck {
  std::vector<double> eta_values;
  DenseMatrix c4;                        ///< degree-4 coefficient
  std::vector<double> residual_norms;    ///< ||D(eta) - eta^4 C4||
  std::vector<double> residual_ratios;   ///< residual_norms / eta^5
  double band_factor = 4.0;
  double vanishing_floor = 0.0;          ///< ratios below this count as zero
  bool bounded = false;                  ///< max ratio <= band * max(min ratio, floor)
};

/// (K(K-1)/2) * [ (mean e_2)^2 - mean(e_2(sigma)^2) ].
DenseMatrix lemma1_coefficient(const MatrixFamily& m_family, unsigned long long K);

/// W_RS - W_SS on A_i = I - eta M_i, evaluated through P_sigma = I + Delta_sigma
/// so that the identity never enters a subtraction.
DenseMatrix rs_minus_ss(const MatrixFamily& m_family, unsigned long long K, double eta);

ExpansionCheck lemma1_expansion_check(const MatrixFamily& m_family, unsigned long long K,
                                      const std::vector<double>& eta_values,
                                      double band_factor = 4.0);

// ---- Small-step regime ---------------------------------------------------

/// Sum of squared commutators is negative definite: its largest eigenvalue is
/// below -1e-10 * ||sum||.
bool theorem1_condition(const MatrixFamily& m_family);

struct Theorem1Descent {
  std::vector<double> eta_grid;
  std::vector<InequalityReport> reports;  ///< main_ss_rs at each grid point
  bool found = false;        ///< some eta* with every grid eta <= eta* holding
  double eta_star = 0.0;     ///< largest such eta with a strictly positive margin
  bool inconclusive = false; ///< nothing found above the 1e-6 floor
};

/// Grid descent for an eta below which ||W_SS|| <= ||W_RS|| on A_i = I - eta M_i.
/// Grid points under 1e-6 are dropped. The default tol absorbs roundoff in the
/// O(eta^4) margin at the smallest grid points.
Theorem1Descent theorem1_descent(const MatrixFamily& m_family, unsigned long long K,
                                 const std::vector<double>& eta_grid,
                                 double tol = 1e-14);

// ---- n = 2 results -------------------------------------------------------

/// Throws WindowViolation unless (1 - 1/(2K)) I <= A, B <= I.
void require_half_k_window(const DenseMatrix& a, const DenseMatrix& b, unsigned long long K);

/// (AB)^K + (BA)^K is PSD.
bool lemma2_check(const DenseMatrix& a, const DenseMatrix& b, unsigned long long K);

/// 1/2 ||(AB)^K + (BA)^K|| <= ||(AB + BA)/2||^K for K = 2^m in the window.
InequalityReport theorem2_check(const DenseMatrix& a, const DenseMatrix& b, unsigned m,
                                double tol = kDefaultVerdictTolerance);

/// Same inequality, 2 x 2 PSD inputs, any K >= 1.
InequalityReport theorem3_check(const DenseMatrix& a, const DenseMatrix& b, unsigned long long K,
                                double tol = kDefaultVerdictTolerance);

/// Largest eigenvalue of ((AB)^{K/2} - (BA)^{K/2})^2; K must be even.
double skew_square_max_eigenvalue(const DenseMatrix& a, const DenseMatrix& b,
                                  unsigned long long K);

/// (1 - 1/(2K)) I + (1/(2K)) Q diag(u) Q^T with u ~ U[0, 1].
DenseMatrix random_window_matrix(Rng& rng, std::size_t d, unsigned long long K);

/// Q diag(u) Q^T, u ~ U[0, 1].
DenseMatrix random_psd_unit(Rng& rng, std::size_t d);

// ---- Numerical radius checks ---------------------------------------------

/// Closed form of 2 ||cos t [[a, b], [b, c]] + i sin t [[0, d], [-d, 0]]||^2.
double lemma6_norm_formula(double a, double b, double c, double d, double theta);

/// The same quantity through the eigensolver.
double lemma6_norm_numeric(double a, double b, double c, double d, double theta);

/// (w(Q L Q^-1), 1/2 ||Q L Q^-1 + Q^-T L Q^T||) for 2 x 2 Q and nonnegative
/// diagonal L.
std::pair<double, double> lemma3_check(const DenseMatrix& q, const DenseMatrix& lambda);

/// (w(M), ||(M + M^T)/2||) for any square M.
std::pair<double, double> radius_vs_symmetric_part(const DenseMatrix& m);

/// The 3 x 3 matrix on which the 2 x 2 radius identity fails.
DenseMatrix lemma3_counterexample_matrix();

// ---- Rank-one regression families ----------------------------------------

struct AssumptionCheck {
  bool a1 = false;
  bool a2 = false;
  double coherence = 0.0;  ///< max_{i != j} |x_i^T x_j|
  double s_min = 0.0;      ///< smallest eigenvalue of sum x_i x_i^T
  double s_max = 0.0;
};

/// Mutual incoherence (A1) and the isometry window (A2), the latter through
/// the extreme eigenvalues of X X^T.
AssumptionCheck check_assumptions_a1_a2(const std::vector<std::vector<double>>& vectors);

/// A_i = I - eta x_i x_i^T.
MatrixFamily rank_one_family(const std::vector<std::vector<double>>& vectors, double eta);

/// Perturbed random orthonormal bases, rejection-sampled until (A1) and (A2)
/// both hold. Returns an empty list after max_tries failures.
std::vector<std::vector<double>> sample_incoherent_vectors(Rng& rng, std::size_t n, std::size_t d,
                                                           double noise, int max_tries = 1000);

struct Lemma4Bounds {
  std::size_t n = 0;
  unsigned long long K = 1;
  double eta = 0.0;
  double delta = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  double rhs_gap_bound = 0.0;  ///< lower bound on lambda_min(W_GD - W_RS)
  double rhs_rs_bound = 0.0;   ///< lower bound on lambda_min(W_RS)
};

Lemma4Bounds lemma4_bounds(std::size_t n, unsigned long long K, double eta, double delta,
                           double s_min, double s_max);

/// delta = n^-1/2, s_min = n^-1/4, s_max = n^1/4.
Lemma4Bounds lemma4_canonical_bounds(std::size_t n, double eta);

}  // namespace amgm
