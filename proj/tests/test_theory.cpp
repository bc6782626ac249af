#include <doctest.h>

#include <cmath>

#include "amgm/counterex.hpp"
#include "amgm/error.hpp"
#include "amgm/matcore.hpp"
#include "amgm/theory.hpp"
#include "oracles.hpp"

using namespace amgm;

namespace {

MatrixFamily random_sym_family(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<DenseMatrix> ms;
  for (std::size_t i = 0; i < n; ++i) ms.push_back(random_symmetric(rng, d));
  return MatrixFamily::make(std::move(ms));
}

// W_RS - W_SS straight from the definition, for comparison with the
// cancellation-free route.
DenseMatrix direct_difference(const MatrixFamily& mf, unsigned long long K, double eta) {
  std::vector<DenseMatrix> as;
  for (const auto& m : mf.members()) as.push_back(DenseMatrix::identity(mf.dim()) - eta * m);
  const auto perms = oracle::all_permutations(as.size());
  DenseMatrix mean(mf.dim(), mf.dim()), ss(mf.dim(), mf.dim());
  for (const auto& p : perms) {
    const auto prod = oracle::naive_product(as, p);
    mean += prod;
    ss += oracle::naive_power(prod, K);
  }
  mean *= 1.0 / static_cast<double>(perms.size());
  ss *= 1.0 / static_cast<double>(perms.size());
  return oracle::naive_power(mean, K) - ss;
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("expansion check: commuting family and K = 1 vanish") {
  const auto diag = MatrixFamily::make({DenseMatrix::diagonal({1.0, 2.0}), DenseMatrix::diagonal({-1.0, 0.5}),
                                        DenseMatrix::diagonal({0.3, 0.3})});
  const auto c = lemma1_expansion_check(diag, 3, {1e-2, 5e-3});
  CHECK(c.c4.max_abs() < 1e-15);
  for (double r : c.residual_norms) CHECK(r < 1e-15);
  CHECK(c.bounded);

  Rng rng(51);
  const auto f = random_sym_family(rng, 3, 3);
  const auto k1 = lemma1_expansion_check(f, 1, {1e-1, 1e-2});
  CHECK(k1.c4.max_abs() == 0.0);
  for (double r : k1.residual_norms) CHECK(r == 0.0);
}

TEST_CASE("cancellation-free difference agrees with the definition at moderate eta") {
  Rng rng(52);
  for (int t = 0; t < 10; ++t) {
    const auto f = random_sym_family(rng, 2 + rng.below(2), 2 + rng.below(2));
    const unsigned long long K = 2 + rng.below(2);
    for (double eta : {0.3, 0.1}) {
      const auto fast = rs_minus_ss(f, K, eta);
      CHECK(max_abs_diff(fast, direct_difference(f, K, eta)) < 1e-12);
    }
  }
}

TEST_CASE("expansion check: random families stay within the band") {
  Rng rng(53);
  for (int t = 0; t < 12; ++t) {
    const auto f = random_sym_family(rng, 2 + t % 2, 2 + (t / 2) % 2);
    const auto c = lemma1_expansion_check(f, 2 + (t / 4) % 2, {1e-2, 5e-3, 2.5e-3});
    CHECK(c.bounded);
    CHECK(c.residual_ratios.size() == 3);
  }
}

TEST_CASE("expansion check: coefficient is PSD when the commutator condition holds") {
  Rng rng(54);
  int tested = 0;
  for (int t = 0; t < 30 && tested < 10; ++t) {
    const auto f = random_sym_family(rng, 2 + t % 2, 2);
    if (!theorem1_condition(f)) continue;
    ++tested;
    const auto c4 = lemma1_coefficient(f, 2);
    CHECK(min_eigenvalue(0.5 * (c4 + c4.transpose())) > 0.0);
  }
  CHECK(tested > 0);
}

TEST_CASE("expansion check preconditions") {
  Rng rng(55);
  const auto f = random_sym_family(rng, 2, 2);
  CHECK_THROWS_AS(lemma1_expansion_check(f, 2, {1e-3, 1e-2}), LabError);
  CHECK_THROWS_AS(lemma1_expansion_check(f, 2, {-1e-3}), LabError);
  std::vector<DenseMatrix> nine(9, DenseMatrix::identity(2));
  try {
    lemma1_expansion_check(MatrixFamily::make(nine), 2, {1e-2});
    FAIL("expected TooManyMatrices");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::TooManyMatrices);
  }
}

TEST_CASE("commutator condition") {
  const auto diag = MatrixFamily::make({DenseMatrix::diagonal({1.0, 2.0}), DenseMatrix::diagonal({3.0, 4.0})});
  CHECK_FALSE(theorem1_condition(diag));

  Rng rng(56);
  for (int t = 0; t < 20; ++t) CHECK(theorem1_condition(random_sym_family(rng, 2, 2)));

  // Shared eigenvector v: M_i = v v^T + R_i with R_i v = 0.
  for (int t = 0; t < 10; ++t) {
    const auto q = random_orthogonal(rng, 3);
    std::vector<DenseMatrix> ms;
    for (int i = 0; i < 3; ++i) {
      DenseMatrix inner(3, 3);
      inner(0, 0) = 1.0;
      const auto r = random_symmetric(rng, 2);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) inner(a + 1, b + 1) = r(a, b);
      const auto m = q * inner * q.transpose();
      ms.push_back(0.5 * (m + m.transpose()));
    }
    const auto f = MatrixFamily::make(ms);
    const auto s = commutator_square_sum(f);
    std::vector<double> v{q(0, 0), q(1, 0), q(2, 0)};
    const auto sv = multiply(s, v);
    double nrm = 0.0;
    for (double x : sv) nrm += x * x;
    CHECK(std::sqrt(nrm) < 1e-12 * (1.0 + spectral_norm(s)));
    CHECK_FALSE(theorem1_condition(f));
  }
}

TEST_CASE("small-step descent finds a working eta for generic families") {
  Rng rng(57);
  int found = 0, tested = 0;
  for (int t = 0; t < 20; ++t) {
    const auto f = random_sym_family(rng, 2 + t % 2, 2 + (t / 2) % 2);
    if (!theorem1_condition(f)) continue;
    ++tested;
    const auto d = theorem1_descent(f, 2 + (t / 4) % 2, {1e-1, 1e-2, 1e-3, 1e-4, 1e-7});
    CHECK(d.eta_grid.size() == 4);
    if (d.found) {
      ++found;
      CHECK(d.eta_star >= 1e-4);
    }
  }
  CHECK(tested > 0);
  CHECK(found == tested);
}

TEST_CASE("PSD claim in the half-K window") {
  CHECK(lemma2_check(DenseMatrix::identity(3), DenseMatrix::identity(3), 4));
  Rng rng(58);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_window_matrix(rng, 4, 4);
    const auto b = random_window_matrix(rng, 4, 4);
    CHECK(lemma2_check(a, b, 4));
  }
  const auto f = appendix_a_family();
  try {
    lemma2_check(f[0], f[1], 2);
    FAIL("expected WindowViolation");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::WindowViolation);
  }
}

TEST_CASE("two-matrix inequality, window and 2 x 2 PSD versions") {
  const auto a = DenseMatrix::diagonal({0.95, 0.97, 1.0});
  const auto eq = theorem2_check(a, a, 3);
  CHECK(eq.holds);
  CHECK(eq.tie);
  Rng rng(59);
  for (int t = 0; t < 100; ++t) {
    const auto x = random_window_matrix(rng, 5, 8);
    const auto y = random_window_matrix(rng, 5, 8);
    CHECK(theorem2_check(x, y, 3).holds);
  }
  CHECK_THROWS_AS(theorem2_check(appendix_a_family()[0], appendix_a_family()[1], 1), LabError);

  const auto p = random_psd_unit(rng, 2);
  CHECK(theorem3_check(p, p, 5).tie);
  const auto r = theorem3_check(DenseMatrix::diagonal({1.0, 0.0}), DenseMatrix::diagonal({0.0, 1.0}), 3);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == 0.0);
  CHECK(r.holds);
  for (unsigned long long K = 1; K <= 20; ++K) {
    for (int t = 0; t < 20; ++t) {
      const auto x = random_psd_unit(rng, 2);
      const auto y = random_psd_unit(rng, 2);
      CHECK(theorem3_check(x, y, K).holds);
    }
  }
  try {
    theorem3_check(DenseMatrix::diagonal({1.0, -0.5}), DenseMatrix::identity(2), 2);
    FAIL("expected NotPsd");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::NotPsd);
  }
}

TEST_CASE("skew-square identity") {
  Rng rng(60);
  for (unsigned long long K : {2ULL, 4ULL, 8ULL}) {
    for (int t = 0; t < 30; ++t) {
      const auto a = random_window_matrix(rng, 4, K);
      const auto b = random_window_matrix(rng, 4, K);
      CHECK(skew_square_max_eigenvalue(a, b, K) <= 1e-10);
    }
  }
}

TEST_CASE("closed-form 2 x 2 norm against the eigensolver") {
  CHECK(lemma6_norm_formula(3.0, 0.0, -1.0, 0.0, 0.0) == doctest::Approx(18.0));
  CHECK(lemma6_norm_formula(0.5, 0.0, 2.0, 0.0, 0.0) == doctest::Approx(8.0));
  // theta = pi/2 leaves only the skew part: 2 ||i d J||^2 = 2 d^2.
  CHECK(std::abs(lemma6_norm_formula(1.0, 2.0, 3.0, 1.5, M_PI / 2) - 2.0 * 1.5 * 1.5) < 1e-12);
  CHECK(std::abs(lemma6_norm_numeric(1.0, 2.0, 3.0, 1.5, M_PI / 2) - 2.0 * 1.5 * 1.5) < 1e-12);
  Rng rng(61);
  for (int t = 0; t < 2000; ++t) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal(), d = rng.normal();
    const double th = rng.uniform(0.0, 2.0 * M_PI);
    const double f = lemma6_norm_formula(a, b, c, d, th);
    const double e = lemma6_norm_numeric(a, b, c, d, th);
    CHECK(std::abs(f - e) <= 1e-9 * std::max(1.0, e));
    // Independent oracle: the embedding matches the real 2 x 2 symmetric closed form at theta = 0.
    if (t < 20) CHECK(std::abs(lemma6_norm_numeric(a, b, c, d, 0.0) - 2.0 * std::pow(oracle::sym2_norm(a, b, c), 2)) < 1e-12);
  }
}

TEST_CASE("numerical radius identity in d = 2 and its failure in d = 3") {
  const auto [w0, h0] = lemma3_check(DenseMatrix::identity(2), DenseMatrix::diagonal({0.3, 0.7}));
  CHECK(std::abs(w0 - 0.7) < 1e-12);
  CHECK(std::abs(h0 - 0.7) < 1e-12);
  Rng rng(62);
  for (int t = 0; t < 200; ++t) {
    DenseMatrix q;
    do q = rng.gaussian_matrix(2, 2);
    while (std::abs(q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0)) < 1e-3);
    const auto [w, h] = lemma3_check(q, DenseMatrix::diagonal({rng.uniform(), rng.uniform()}));
    CHECK(std::abs(w - h) <= 1e-8);
  }
  const auto [w3, h3] = radius_vs_symmetric_part(lemma3_counterexample_matrix());
  CHECK(std::abs(w3 - 3.0004) < 5e-4);
  CHECK(std::abs(h3 - 3.0) < 1e-9);
  CHECK(w3 > h3 + 1e-5);
  CHECK(oracle::sampled_radius(lemma3_counterexample_matrix(), 20000, 3) > 3.0);

  try {
    lemma3_check(DenseMatrix::from_rows({{1, 2}, {2, 4}}), DenseMatrix::identity(2));
    FAIL("expected SingularQ");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::SingularQ);
  }
}

TEST_CASE("incoherence and isometry assumptions") {
  std::vector<std::vector<double>> basis(4, std::vector<double>(4, 0.0));
  for (int i = 0; i < 4; ++i) basis[i][i] = 1.0;
  const auto c = check_assumptions_a1_a2(basis);
  CHECK(c.a1);
  CHECK(c.a2);
  CHECK(c.coherence == 0.0);
  CHECK(std::abs(c.s_min - 1.0) < 1e-14);
  CHECK(std::abs(c.s_max - 1.0) < 1e-14);

  auto rep = basis;
  rep[1] = rep[0];
  const auto cr = check_assumptions_a1_a2(rep);
  CHECK_FALSE(cr.a1);
  CHECK(cr.coherence == 1.0);

  try {
    check_assumptions_a1_a2({{1.0, 0.1}});
    FAIL("expected NotUnitVector");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::NotUnitVector);
  }

  // Sampled directions only ever under-estimate s_max and over-estimate s_min.
  Rng rng(63);
  std::vector<std::vector<double>> x;
  for (int i = 0; i < 16; ++i) {
    auto v = rng.gaussian_vector(8);
    double nv = 0.0;
    for (double e : v) nv += e * e;
    for (auto& e : v) e /= std::sqrt(nv);
    x.push_back(v);
  }
  const auto cx = check_assumptions_a1_a2(x);
  double lo = 1e300, hi = 0.0;
  for (int s = 0; s < 100000; ++s) {
    auto u = rng.gaussian_vector(8);
    double nu = 0.0;
    for (double e : u) nu += e * e;
    double q = 0.0;
    for (const auto& v : x) {
      double ip = 0.0;
      for (int r = 0; r < 8; ++r) ip += u[r] * v[r];
      q += ip * ip;
    }
    q /= nu;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(hi <= cx.s_max + 1e-12);
  CHECK(lo >= cx.s_min - 1e-12);
  CHECK(hi >= 0.9 * cx.s_max);
}

TEST_CASE("rank-one bounds") {
  const auto z = lemma4_canonical_bounds(8, 0.0);
  CHECK(z.rhs_gap_bound == 0.0);
  CHECK(z.rhs_rs_bound == 1.0);
  for (std::size_t n = 4; n <= 64; ++n) {
    for (double scale : {1.0, 0.5, 0.1}) {
      const auto b = lemma4_canonical_bounds(n, scale / (6.0 * static_cast<double>(n)));
      CHECK(b.rhs_gap_bound >= 0.0);
      CHECK(b.rhs_rs_bound >= 0.0);
    }
  }
  CHECK_THROWS_AS(lemma4_bounds(1, 1, 0.1, 0.1, 1, 1), LabError);
}

TEST_CASE("rank-one bounds hold against exact enumeration") {
  Rng rng(64);
  for (std::size_t n : {4u, 5u, 6u}) {
    for (int t = 0; t < 5; ++t) {
      const auto x = sample_incoherent_vectors(rng, n, n, 0.1);
      REQUIRE_FALSE(x.empty());
      const auto chk = check_assumptions_a1_a2(x);
      const double eta = 1.0 / (6.0 * static_cast<double>(n));
      const auto b = lemma4_bounds(n, 1, eta, chk.coherence, chk.s_min, chk.s_max);
      const auto tri = means_triple(rank_one_family(x, eta), 1);
      const auto gap = tri.w_gd - tri.w_rs;
      CHECK(min_eigenvalue(0.5 * (gap + gap.transpose())) >= b.rhs_gap_bound - 1e-12);
      CHECK(min_eigenvalue(0.5 * (tri.w_rs + tri.w_rs.transpose())) >= b.rhs_rs_bound - 1e-12);
      CHECK(tri.norm_rs <= tri.norm_gd + 1e-12);
    }
  }
}

}
