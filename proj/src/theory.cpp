#include "amgm/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amgm/error.hpp"
#include "amgm/matcore.hpp"

namespace amgm {

namespace {

constexpr std::size_t kMaxExpansionMatrices = 8;
constexpr double kEtaFloor = 1e-6;
constexpr double kVanishingRatio = 1e-6;
constexpr double kUnitTolerance = 1e-10;
constexpr double kSingularDet = 1e-10;

void require_expansion_family(const MatrixFamily& f, unsigned long long K) {
  if (f.size() == 0) throw LabError(ErrorKind::OutOfRange, "empty family");
  if (f.size() > kMaxExpansionMatrices)
    throw LabError(ErrorKind::TooManyMatrices, "expansion check supports n <= 8");
  if (K == 0 || K > kMaxEpochs) throw LabError(ErrorKind::OutOfRange, "K out of range");
}

double binomial(unsigned long long K, unsigned long long j) {
  double c = 1.0;
  for (unsigned long long i = 1; i <= j; ++i) c = c * static_cast<double>(K - j + i) / static_cast<double>(i);
  return c;
}

DenseMatrix symmetric_part(const DenseMatrix& x) {
  DenseMatrix s = x + x.transpose();
  s *= 0.5;
  return s;
}

void require_square_pair(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.is_square() || !b.is_square()) throw LabError(ErrorKind::NonSquare, "A and B must be square");
  if (a.rows() != b.rows()) throw LabError(ErrorKind::DimensionMismatch, "A and B differ in size");
  if (!a.all_finite() || !b.all_finite()) throw LabError(ErrorKind::NonFinite, "non-finite entry");
  if (!is_symmetric(a, kSymmetryTolerance) || !is_symmetric(b, kSymmetryTolerance))
    throw LabError(ErrorKind::NotSymmetric, "A and B must be symmetric");
}

// lhs = 1/2 ||X + X^T||, X = (AB)^K; rhs = ||Sym(AB)||^K.
InequalityReport two_matrix_report(const DenseMatrix& a, const DenseMatrix& b,
                                   unsigned long long K, double tol) {
  const DenseMatrix ab = a * b;
  const DenseMatrix x = matrix_power(ab, K);
  const double lhs = 0.5 * spectral_norm(x + x.transpose());
  const double rhs = std::pow(spectral_norm(symmetric_part(ab)), static_cast<double>(K));
  InequalityReport r = make_report(Variant::MainSsRs, lhs, rhs, tol);
  r.n = 2;
  r.K = K;
  r.d = a.rows();
  return r;
}

DenseMatrix inverse_2x2(const DenseMatrix& q) {
  const double det = q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0);
  if (!(std::abs(det) >= kSingularDet)) throw LabError(ErrorKind::SingularQ, "|det Q| < 1e-10");
  return DenseMatrix::from_rows({{q(1, 1) / det, -q(0, 1) / det}, {-q(1, 0) / det, q(0, 0) / det}});
}

}  // namespace

DenseMatrix lemma1_coefficient(const MatrixFamily& mf, unsigned long long K) {
  require_expansion_family(mf, K);
  const std::size_t n = mf.size();
  const std::size_t d = mf.dim();
  if (n < 2 || K < 2) return DenseMatrix(d, d);

  const DenseMatrix e2_bar = elementary_symmetric_mean(mf, 2);
  DenseMatrix e2_sq_mean(d, d);
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    const DenseMatrix e2 = elementary_symmetric(mf, sigma, 2);
    e2_sq_mean += e2 * e2;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  e2_sq_mean *= 1.0 / static_cast<double>(factorial(n));

  DenseMatrix c4 = e2_bar * e2_bar - e2_sq_mean;
  c4 *= binomial(K, 2);
  return c4;
}

DenseMatrix rs_minus_ss(const MatrixFamily& mf, unsigned long long K, double eta) {
  require_expansion_family(mf, K);
  if (!std::isfinite(eta)) throw LabError(ErrorKind::NonFinite, "eta must be finite");
  const std::size_t n = mf.size();
  const std::size_t d = mf.dim();

  // Delta_sigma = P_sigma - I, built by Delta_k = Delta_{k-1} - eta M - eta Delta_{k-1} M.
  std::vector<DenseMatrix> deltas;
  deltas.reserve(factorial(n));
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  DenseMatrix tmp(d, d);
  do {
    DenseMatrix delta(d, d);
    for (std::size_t k = 0; k < n; ++k) {
      const DenseMatrix& m = mf[sigma[k]];
      multiply_into(delta, m, tmp);
      tmp += m;
      tmp *= eta;
      delta -= tmp;
    }
    deltas.push_back(std::move(delta));
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  const double inv = 1.0 / static_cast<double>(deltas.size());
  DenseMatrix delta_bar(d, d);
  for (const auto& dl : deltas) delta_bar += dl;
  delta_bar *= inv;

  // D = sum_{j >= 2} C(K, j) [ delta_bar^j - mean(Delta_sigma^j) ]
  DenseMatrix result(d, d);
  DenseMatrix bar_pow = delta_bar;
  std::vector<DenseMatrix> pows = deltas;
  for (unsigned long long j = 2; j <= K; ++j) {
    bar_pow = bar_pow * delta_bar;
    DenseMatrix mean_pow(d, d);
    for (std::size_t s = 0; s < deltas.size(); ++s) {
      multiply_into(pows[s], deltas[s], tmp);
      std::swap(pows[s], tmp);
      mean_pow += pows[s];
    }
    mean_pow *= inv;
    DenseMatrix term = bar_pow - mean_pow;
    term *= binomial(K, j);
    result += term;
  }
  return result;
}

ExpansionCheck lemma1_expansion_check(const MatrixFamily& mf, unsigned long long K,
                                      const std::vector<double>& eta_values, double band_factor) {
  require_expansion_family(mf, K);
  if (eta_values.empty()) throw LabError(ErrorKind::OutOfRange, "empty eta ladder");
  for (std::size_t i = 0; i < eta_values.size(); ++i) {
    if (!(eta_values[i] > 0.0) || !std::isfinite(eta_values[i]))
      throw LabError(ErrorKind::OutOfRange, "eta values must be positive");
    if (i > 0 && !(eta_values[i] < eta_values[i - 1]))
      throw LabError(ErrorKind::OutOfRange, "eta values must be strictly descending");
  }

  ExpansionCheck out;
  out.eta_values = eta_values;
  out.band_factor = band_factor;
  out.c4 = lemma1_coefficient(mf, K);
  out.vanishing_floor = kVanishingRatio * std::max(1.0, spectral_norm(out.c4));
  for (double eta : eta_values) {
    const DenseMatrix d = rs_minus_ss(mf, K, eta);
    const double e4 = eta * eta * eta * eta;
    const double res = spectral_norm(d - e4 * out.c4);
    out.residual_norms.push_back(res);
    out.residual_ratios.push_back(res / (e4 * eta));
  }
  const auto [lo, hi] = std::minmax_element(out.residual_ratios.begin(), out.residual_ratios.end());
  out.bounded = *hi <= band_factor * std::max(*lo, out.vanishing_floor);
  return out;
}

bool theorem1_condition(const MatrixFamily& mf) {
  const DenseMatrix s = commutator_square_sum(mf);
  const double norm = spectral_norm(s);
  if (norm == 0.0) return false;
  return max_eigenvalue(symmetric_part(s)) < -1e-10 * norm;
}

Theorem1Descent theorem1_descent(const MatrixFamily& mf, unsigned long long K,
                                 const std::vector<double>& eta_grid, double tol) {
  if (mf.size() == 0) throw LabError(ErrorKind::OutOfRange, "empty family");
  Theorem1Descent out;
  for (double eta : eta_grid)
    if (eta >= kEtaFloor) out.eta_grid.push_back(eta);
  std::sort(out.eta_grid.begin(), out.eta_grid.end(), std::greater<>());

  const std::size_t d = mf.dim();
  const DenseMatrix id = DenseMatrix::identity(d);
  for (double eta : out.eta_grid) {
    std::vector<DenseMatrix> members;
    for (const auto& m : mf.members()) members.push_back(id - eta * m);
    const auto fam = MatrixFamily::make(std::move(members));
    InequalityReport r = check_main(fam, K, tol).first;
    out.reports.push_back(r);
  }
  // Smallest-index i with margin > 0 at i and holds for every later (smaller) eta.
  bool tail_holds = true;
  for (std::size_t i = out.eta_grid.size(); i-- > 0;) {
    tail_holds = tail_holds && out.reports[i].holds;
    if (!tail_holds) break;
    if (out.reports[i].margin > 0.0) {
      out.found = true;
      out.eta_star = out.eta_grid[i];
    }
  }
  out.inconclusive = !out.found;
  return out;
}

void require_half_k_window(const DenseMatrix& a, const DenseMatrix& b, unsigned long long K) {
  require_square_pair(a, b);
  if (K == 0) throw LabError(ErrorKind::OutOfRange, "K must be positive");
  const double lower = 1.0 - 1.0 / (2.0 * static_cast<double>(K));
  const DenseMatrix id = DenseMatrix::identity(a.rows());
  for (const DenseMatrix* m : {&a, &b}) {
    if (!is_psd(*m - lower * id) || !is_psd(id - *m))
      throw LabError(ErrorKind::WindowViolation, "matrix outside (1 - 1/(2K)) I <= . <= I");
  }
}

bool lemma2_check(const DenseMatrix& a, const DenseMatrix& b, unsigned long long K) {
  require_half_k_window(a, b, K);
  const DenseMatrix x = matrix_power(a * b, K);
  return is_psd(x + x.transpose());
}

InequalityReport theorem2_check(const DenseMatrix& a, const DenseMatrix& b, unsigned m,
                                double tol) {
  if (m == 0 || m > 19) throw LabError(ErrorKind::OutOfRange, "m must lie in [1, 19]");
  const unsigned long long K = 1ULL << m;
  require_half_k_window(a, b, K);
  InequalityReport r = two_matrix_report(a, b, K, tol);
  r.eta_window = 1.0 / (2.0 * static_cast<double>(K));
  return r;
}

InequalityReport theorem3_check(const DenseMatrix& a, const DenseMatrix& b, unsigned long long K,
                                double tol) {
  require_square_pair(a, b);
  if (a.rows() != 2) throw LabError(ErrorKind::DimensionMismatch, "A and B must be 2 x 2");
  if (K == 0 || K > kMaxEpochs) throw LabError(ErrorKind::OutOfRange, "K out of range");
  if (!is_psd(a) || !is_psd(b)) throw LabError(ErrorKind::NotPsd, "A and B must be PSD");
  return two_matrix_report(a, b, K, tol);
}

double skew_square_max_eigenvalue(const DenseMatrix& a, const DenseMatrix& b,
                                  unsigned long long K) {
  require_square_pair(a, b);
  if (K == 0 || K % 2 != 0) throw LabError(ErrorKind::OutOfRange, "K must be even and positive");
  const DenseMatrix x = matrix_power(a * b, K / 2);
  const DenseMatrix s = x - x.transpose();
  return max_eigenvalue(symmetric_part(s * s));
}

DenseMatrix random_psd_unit(Rng& rng, std::size_t d) {
  std::vector<double> u(d);
  for (auto& v : u) v = rng.uniform();
  return symmetric_part(random_symmetric_with_spectrum(rng, u));
}

DenseMatrix random_window_matrix(Rng& rng, std::size_t d, unsigned long long K) {
  const double eta = 1.0 / (2.0 * static_cast<double>(K));
  std::vector<double> eigs(d);
  for (auto& v : eigs) v = 1.0 - eta + eta * rng.uniform();
  return symmetric_part(random_symmetric_with_spectrum(rng, eigs));
}

double lemma6_norm_formula(double a, double b, double c, double d, double theta) {
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  const double c2 = c1 * c1;
  const double s2 = s1 * s1;
  const double diff = a * a - c * c;
  const double root =
      std::sqrt(diff * diff * c2 * c2 + 4.0 * (a + c) * (a + c) * c2 * (b * b * c2 + d * d * s2));
  return (a * a + 2.0 * b * b + c * c) * c2 + 2.0 * d * d * s2 + root;
}

double lemma6_norm_numeric(double a, double b, double c, double d, double theta) {
  const double co = std::cos(theta);
  const double si = std::sin(theta);
  // [[Re, -Im], [Im, Re]] with Re = cos S, Im = sin [[0, d], [-d, 0]]
  const DenseMatrix e = DenseMatrix::from_rows({
      {co * a, co * b, 0.0, -si * d},
      {co * b, co * c, si * d, 0.0},
      {0.0, si * d, co * a, co * b},
      {-si * d, 0.0, co * b, co * c},
  });
  const EigenResult eig = sym_eigen(e);
  const double norm = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
  return 2.0 * norm * norm;
}

std::pair<double, double> radius_vs_symmetric_part(const DenseMatrix& m) {
  if (!m.is_square()) throw LabError(ErrorKind::NonSquare, "matrix must be square");
  return {numerical_radius(m), spectral_norm(symmetric_part(m))};
}

std::pair<double, double> lemma3_check(const DenseMatrix& q, const DenseMatrix& lambda) {
  if (q.rows() != 2 || q.cols() != 2 || lambda.rows() != 2 || lambda.cols() != 2)
    throw LabError(ErrorKind::DimensionMismatch, "Q and L must be 2 x 2");
  if (!q.all_finite() || !lambda.all_finite()) throw LabError(ErrorKind::NonFinite, "non-finite entry");
  if (lambda(0, 1) != 0.0 || lambda(1, 0) != 0.0 || lambda(0, 0) < 0.0 || lambda(1, 1) < 0.0)
    throw LabError(ErrorKind::OutOfRange, "L must be nonnegative diagonal");
  const DenseMatrix m = q * lambda * inverse_2x2(q);
  return radius_vs_symmetric_part(m);
}

DenseMatrix lemma3_counterexample_matrix() {
  return DenseMatrix::from_rows({{3.0, 0.05, 0.3}, {-0.05, 3.0, -0.1}, {-0.3, 0.1, 2.0}});
}

AssumptionCheck check_assumptions_a1_a2(const std::vector<std::vector<double>>& x) {
  if (x.empty()) throw LabError(ErrorKind::OutOfRange, "no vectors");
  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  if (d == 0) throw LabError(ErrorKind::DimensionMismatch, "empty vector");
  for (const auto& v : x) {
    if (v.size() != d) throw LabError(ErrorKind::DimensionMismatch, "vectors differ in dimension");
    double sq = 0.0;
    for (double e : v) {
      if (!std::isfinite(e)) throw LabError(ErrorKind::NonFinite, "non-finite entry");
      sq += e * e;
    }
    if (std::abs(std::sqrt(sq) - 1.0) > kUnitTolerance)
      throw LabError(ErrorKind::NotUnitVector, "vector is not unit within 1e-10");
  }

  AssumptionCheck out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.coherence = std::max(out.coherence, std::abs(std::inner_product(
                                                  x[i].begin(), x[i].end(), x[j].begin(), 0.0)));

  DenseMatrix g(d, d);
  for (const auto& v : x)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) g(r, c) += v[r] * v[c];
  const auto eig = sym_eigen(g);
  out.s_min = eig.eigenvalues.front();
  out.s_max = eig.eigenvalues.back();

  const double nd = static_cast<double>(n);
  out.a1 = out.coherence <= 1.0 / std::sqrt(nd);
  out.a2 = out.s_min >= std::pow(nd, -0.25) && out.s_max <= std::pow(nd, 0.25);
  return out;
}

MatrixFamily rank_one_family(const std::vector<std::vector<double>>& x, double eta) {
  if (x.empty()) throw LabError(ErrorKind::OutOfRange, "no vectors");
  const std::size_t d = x.front().size();
  std::vector<DenseMatrix> members;
  for (const auto& v : x) {
    if (v.size() != d) throw LabError(ErrorKind::DimensionMismatch, "vectors differ in dimension");
    DenseMatrix a = DenseMatrix::identity(d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) a(r, c) -= eta * v[r] * v[c];
    members.push_back(std::move(a));
  }
  return MatrixFamily::make(std::move(members));
}

std::vector<std::vector<double>> sample_incoherent_vectors(Rng& rng, std::size_t n, std::size_t d,
                                                           double noise, int max_tries) {
  if (n == 0 || d == 0) throw LabError(ErrorKind::OutOfRange, "n and d must be positive");
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    const DenseMatrix q = random_orthogonal(rng, d);
    std::vector<std::vector<double>> x(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
      double sq = 0.0;
      for (std::size_t r = 0; r < d; ++r) {
        const double base = i < d ? q(r, i) : 0.0;
        x[i][r] = base + noise * rng.normal() / std::sqrt(static_cast<double>(d));
        sq += x[i][r] * x[i][r];
      }
      const double norm = std::sqrt(sq);
      for (auto& e : x[i]) e /= norm;
    }
    const auto check = check_assumptions_a1_a2(x);
    if (check.a1 && check.a2) return x;
  }
  return {};
}

Lemma4Bounds lemma4_bounds(std::size_t n, unsigned long long K, double eta, double delta,
                           double s_min, double s_max) {
  if (n < 2) throw LabError(ErrorKind::OutOfRange, "n must be at least 2");
  for (double v : {eta, delta, s_min, s_max})
    if (!std::isfinite(v)) throw LabError(ErrorKind::NonFinite, "non-finite parameter");
  Lemma4Bounds out{n, K, eta, delta, s_min, s_max, 0.0, 0.0};
  const double nd = static_cast<double>(n);

  double gap = eta * eta * (nd - 1.0) * (1.0 - delta) * s_min / (2.0 * nd);
  for (std::size_t m = 4; m <= n; ++m) {
    const double md = static_cast<double>(m);
    gap -= std::pow(eta, md) *
           (std::pow(s_max, md) + s_max * std::pow(nd, md - 1.0) * std::pow(delta, md - 1.0));
  }
  gap -= eta * eta * eta / 6.0 *
         (3.0 * s_max * s_max * s_max / nd +
          s_max * std::sqrt(nd) *
              std::sqrt(nd * nd * std::pow(delta, 4.0) + 6.0 * nd * delta * delta + 1.0));
  out.rhs_gap_bound = gap;

  double rs = 1.0;
  for (std::size_t m = 1; m <= n; ++m) {
    const double md = static_cast<double>(m);
    rs -= s_max * std::pow(eta, md) * std::pow(nd, md - 1.0) * std::pow(delta, md - 1.0);
  }
  out.rhs_rs_bound = rs;
  return out;
}

Lemma4Bounds lemma4_canonical_bounds(std::size_t n, double eta) {
  const double nd = static_cast<double>(n);
  return lemma4_bounds(n, 1, eta, 1.0 / std::sqrt(nd), std::pow(nd, -0.25), std::pow(nd, 0.25));
}

}  // namespace amgm
