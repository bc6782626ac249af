// Acceptance suite: one PASS/FAIL line per criterion, with wall time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "amgm/counterex.hpp"
#include "amgm/inequality.hpp"
#include "amgm/matcore.hpp"
#include "amgm/permprod.hpp"
#include "amgm/rng.hpp"
#include "amgm/sgdlab.hpp"
#include "amgm/theory.hpp"
#include "oracles.hpp"

using namespace amgm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> run;
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

MatrixFamily random_psd_pair(Rng& rng, std::size_t d) {
  std::vector<DenseMatrix> ms;
  for (int i = 0; i < 2; ++i) {
    const auto u = rng.gaussian_matrix(d, d);
    auto a = u * u.transpose();
    a *= 1.0 / spectral_norm(a);
    ms.push_back(0.5 * (a + a.transpose()));
  }
  return MatrixFamily::make(std::move(ms));
}

// 1
Outcome exact_norms() {
  Outcome o;
  const auto f = appendix_a_family();
  double worst = 0.0;
  for (unsigned long long K = 1; K <= 8; ++K) {
    const auto t = means_triple(f, K);
    const double ss = 1.0 / (2.0 * std::pow(8.0, static_cast<double>(K)));
    const double rs = std::pow(16.0, -static_cast<double>(K));
    worst = std::max({worst, std::abs(t.norm_ss - ss) / ss, std::abs(t.norm_rs - rs) / rs});
    const auto r = check_main(f, K).first;
    const bool verdict_ok = K == 1 ? (r.holds && r.tie) : !r.holds;
    if (!verdict_ok) {
      o.pass = false;
      o.detail += "verdict wrong at K=" + std::to_string(K) + "; ";
    }
  }
  if (worst > 1e-12) o.pass = false;
  o.detail += "max relative norm error " + fmt("%.2e", worst);
  return o;
}

// 2
Outcome lifted_cubic() {
  Outcome o;
  double worst = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double eta = 0.1 * i;
    const auto pm = permutation_mean(lifted_family(eta));
    worst = std::max(worst, max_abs_diff(pm, rs_polynomial(eta) * DenseMatrix::identity(2)));
  }
  const double root = rs_polynomial_root();
  double rs_root = 0.0;
  for (unsigned long long K = 1; K <= 5; ++K)
    rs_root = std::max(rs_root, means_triple(lifted_family(root), K).norm_rs);
  o.pass = worst <= 1e-12 && rs_root <= 1e-12;
  o.detail = "max entry error " + fmt("%.2e", worst) + ", ||W_RS|| at root " + fmt("%.2e", rs_root);
  return o;
}

// 3
Outcome ratio_bound() {
  Outcome o;
  std::vector<unsigned long long> failing;
  double worst_k2 = 0.0;
  double ratio_k1 = 0.0;
  for (unsigned long long K = 1; K <= 200; ++K) {
    const auto row = sweep_point(K, std::pow(static_cast<double>(K), -1.0 / 3.0));
    if (K == 1) ratio_k1 = row.ratio;
    else worst_k2 = std::max(worst_k2, row.ratio);
    if (row.infinite || !(row.ratio <= 0.999999)) failing.push_back(K);
  }
  o.pass = failing.empty();
  std::ostringstream os;
  os << "ratio at K=1 " << fmt("%.9f", ratio_k1) << ", max over K=2..200 " << fmt("%.6f", worst_k2);
  if (!failing.empty()) {
    os << "; exceeds 0.999999 at K =";
    for (auto k : failing) os << ' ' << k;
    os << " (K=1 has W_SS = W_RS identically, ratio exactly 1)";
  }
  o.detail = os.str();
  return o;
}

// 4
Outcome rank_deficient_counterexample() {
  Outcome o;
  std::ostringstream os;
  for (std::size_t n : {2u, 3u, 4u})
    if (desa_criterion(n).second) {
      o.pass = false;
      os << "criterion true at n=" << n << "; ";
    }
  if (!desa_criterion(5).second) {
    o.pass = false;
    os << "criterion false at n=5; ";
  }
  const auto r5 = check_recht_re(desa_family(5), 5);
  if (r5.holds) o.pass = false;
  const auto p5 = perturbation_break_check(5, 0.06);
  const auto p10 = perturbation_break_check(10, 0.36);
  if (!p5.holds || !p10.holds) o.pass = false;
  os << "n=5 margin " << fmt("%.4f", r5.margin) << ", +0.06I margin " << fmt("%.4f", p5.margin)
     << ", n=10 +0.36I margin " << fmt("%.4f", p10.margin);
  o.detail = os.str();
  return o;
}

// 5
Outcome radius_identities() {
  Outcome o;
  Rng rng(500);
  double worst6 = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal(), d = rng.normal();
    const double th = rng.uniform(0.0, 2.0 * M_PI);
    const double e = lemma6_norm_numeric(a, b, c, d, th);
    worst6 = std::max(worst6, std::abs(lemma6_norm_formula(a, b, c, d, th) - e) / std::max(1.0, e));
  }
  double worst3 = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Rng r(501, {static_cast<std::uint64_t>(t)});
    DenseMatrix q;
    do q = r.gaussian_matrix(2, 2);
    while (std::abs(q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0)) < 1e-3);
    const auto [w, h] = lemma3_check(q, DenseMatrix::diagonal({r.uniform(), r.uniform()}));
    worst3 = std::max(worst3, std::abs(w - h));
  }
  const auto [w18, h18] = radius_vs_symmetric_part(lemma3_counterexample_matrix());
  o.pass = worst6 <= 1e-9 && worst3 <= 1e-8 && std::abs(w18 - 3.0004) <= 5e-4 && std::abs(h18 - 3.0) <= 1e-9;
  o.detail = "closed form rel err " + fmt("%.2e", worst6) + ", 2x2 radius gap " + fmt("%.2e", worst3) +
             ", 3x3 w " + fmt("%.6f", w18) + " vs sym-part " + fmt("%.12f", h18);
  return o;
}

// 6
Outcome two_matrix_suites() {
  Outcome o;
  int v2 = 0, v3 = 0;
  double min_margin = 1e300;
  for (unsigned m = 1; m <= 3; ++m) {
    const unsigned long long K = 1ULL << m;
    for (int t = 0; t < 1000; ++t) {
      Rng rng(600 + m, {static_cast<std::uint64_t>(t)});
      const std::size_t d = 2 + rng.below(4);
      const auto a = random_window_matrix(rng, d, K);
      const auto b = random_window_matrix(rng, d, K);
      const auto r = theorem2_check(a, b, m, 1e-10);
      min_margin = std::min(min_margin, r.margin);
      if (!r.holds) ++v2;
    }
  }
  for (unsigned long long K = 1; K <= 20; ++K) {
    for (int t = 0; t < 1000; ++t) {
      Rng rng(700 + K, {static_cast<std::uint64_t>(t)});
      const auto a = random_psd_unit(rng, 2);
      const auto b = random_psd_unit(rng, 2);
      const auto r = theorem3_check(a, b, K, 1e-10);
      min_margin = std::min(min_margin, r.margin);
      if (!r.holds) ++v3;
    }
  }
  o.pass = v2 == 0 && v3 == 0;
  o.detail = "window violations " + std::to_string(v2) + "/3000, 2x2 PSD violations " + std::to_string(v3) +
             "/20000, min margin " + fmt("%.2e", min_margin);
  return o;
}

// 7
Outcome residual_band() {
  Outcome o;
  int bad = 0;
  double widest = 0.0;
  for (int f = 0; f < 20; ++f) {
    Rng rng(800, {static_cast<std::uint64_t>(f)});
    const std::size_t n = 2 + f % 2, d = 2 + (f / 2) % 2;
    const unsigned long long K = 2 + (f / 4) % 2;
    std::vector<DenseMatrix> ms;
    for (std::size_t i = 0; i < n; ++i) ms.push_back(random_symmetric(rng, d));
    const auto c = lemma1_expansion_check(MatrixFamily::make(ms), K, {1e-2, 5e-3, 2.5e-3});
    const auto [lo, hi] = std::minmax_element(c.residual_ratios.begin(), c.residual_ratios.end());
    if (*lo > c.vanishing_floor) widest = std::max(widest, *hi / *lo);
    if (!c.bounded) ++bad;
  }
  o.pass = bad == 0;
  o.detail = std::to_string(bad) + "/20 families outside the x4 band, widest nonvanishing spread " +
             fmt("%.4f", widest);
  return o;
}

// 8
Outcome rank_one_regression() {
  Outcome o;
  int violations = 0, sets = 0;
  for (std::size_t n : {4u, 8u}) {
    std::vector<std::vector<std::vector<double>>> all;
    std::vector<std::vector<double>> basis(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) basis[i][i] = 1.0;
    all.push_back(basis);
    for (int s = 0; s < 50; ++s) {
      Rng rng(900 + n, {static_cast<std::uint64_t>(s)});
      auto x = sample_incoherent_vectors(rng, n, n, 0.1);
      if (x.empty()) {
        o.pass = false;
        o.detail += "sampler failed; ";
        continue;
      }
      all.push_back(std::move(x));
    }
    const double nd = static_cast<double>(n);
    for (const auto& x : all) {
      ++sets;
      for (double eta : {0.0, 1.0 / (12.0 * nd), 1.0 / (6.0 * nd)})
        if (!check_main(rank_one_family(x, eta), 1).second.holds) ++violations;
    }
  }
  double min_bound = 1e300;
  for (std::size_t n = 4; n <= 64; ++n) {
    const auto b = lemma4_canonical_bounds(n, 1.0 / (6.0 * static_cast<double>(n)));
    min_bound = std::min({min_bound, b.rhs_gap_bound, b.rhs_rs_bound});
  }
  if (violations != 0 || min_bound < 0.0) o.pass = false;
  o.detail += std::to_string(violations) + " violations over " + std::to_string(sets) +
              " vector sets x 3 step sizes, smallest bound " + fmt("%.3e", min_bound);
  return o;
}

// 9
Outcome shuffling_order() {
  const auto s = ordering_experiment(20, 30, 0.5, 50, 100, 2024, false, workers());
  Outcome o;
  o.pass = s.win_ss_rs >= 0.6 && s.win_rs_sgd >= 0.6 && s.proj_win_ss_rs >= 0.6 && s.proj_win_rs_sgd >= 0.6;
  o.detail = "loss wins SS<=RS " + fmt("%.2f", s.win_ss_rs) + ", RS<=SGD " + fmt("%.2f", s.win_rs_sgd) +
             "; proj-norm wins SS<=RS " + fmt("%.2f", s.proj_win_ss_rs) + ", RS<=SGD " +
             fmt("%.2f", s.proj_win_rs_sgd);
  return o;
}

// 10
Outcome random_search_replication() {
  SearchConfig cfg;
  cfg.n = 3;
  cfg.K = 10;
  cfg.d = 2;
  cfg.trials = 100000;
  cfg.seed = 1;
  cfg.include_variants = false;
  cfg.workers = workers();
  cfg.eta = 1.0;
  const auto hot = random_search(cfg);
  cfg.eta = 0.25;
  const auto cold = random_search(cfg);
  auto count_main = [](const SearchResult& r) {
    return std::count_if(r.violations.begin(), r.violations.end(),
                         [](const CounterexampleReport& c) { return c.violated_variant == Variant::MainSsRs; });
  };
  const auto h = count_main(hot);
  const auto c = count_main(cold);
  Outcome o;
  o.pass = h >= 1 && c == 0;
  o.detail = "eta=1: " + std::to_string(h) + " violating trials, eta=0.25: " + std::to_string(c);
  return o;
}

// 11
Outcome replacement_operators() {
  Outcome o;
  Rng rng(1100);
  double ewr_err = 0.0, ewo_err = 0.0;
  for (std::size_t n = 2; n <= 5; ++n) {
    std::vector<DenseMatrix> ms;
    for (std::size_t i = 0; i < n; ++i) {
      const auto u = rng.gaussian_matrix(3, 3);
      auto a = u * u.transpose();
      a *= 1.0 / spectral_norm(a);
      ms.push_back(0.5 * (a + a.transpose()));
    }
    const auto f = MatrixFamily::make(ms);
    for (std::size_t m = 1; m <= 6; ++m)
      ewr_err = std::max(ewr_err, max_abs_diff(ewr_mean_enumerated(f, m), ewr_mean_power(f, m)));
    ewo_err = std::max(ewo_err, max_abs_diff(ewo_mean(f, n), permutation_mean(f)));
  }
  int prop_viol = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng r(1101, {static_cast<std::uint64_t>(t)});
    const auto f = random_psd_pair(r, 2 + r.below(3));
    for (const auto& rep : check_all_variants(f, 2))
      if ((rep.variant == Variant::NormSsRs || rep.variant == Variant::NormSymSsRs) && !rep.holds) ++prop_viol;
  }
  double sym_err = 0.0;
  for (unsigned K : {2u, 3u}) {
    const auto f = random_psd_pair(rng, 3);
    const auto sm = symmetrized_means(f, K);
    const std::vector<std::vector<std::size_t>> perms{{0, 1}, {1, 0}};
    DenseMatrix brute(3, 3);
    const std::size_t total = std::size_t{1} << K;
    for (std::size_t code = 0; code < total; ++code) {
      DenseMatrix s = DenseMatrix::identity(3);
      for (unsigned k = 0; k < K; ++k) s = oracle::naive_mul(s, oracle::naive_product(f.members(), perms[(code >> k) & 1U]));
      brute += oracle::naive_mul(s.transpose(), s);
    }
    brute *= 1.0 / static_cast<double>(total);
    sym_err = std::max(sym_err, max_abs_diff(sm.right, brute));
  }
  o.pass = ewr_err <= 1e-12 && ewo_err <= 1e-13 && prop_viol == 0 && sym_err <= 1e-12;
  o.detail = "E_wr enum vs power " + fmt("%.2e", ewr_err) + ", E_wo(n) vs mean " + fmt("%.2e", ewo_err) +
             ", norm-variant violations " + std::to_string(prop_viol) + "/2000, recursion vs brute " +
             fmt("%.2e", sym_err);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "counterexample triple: exact norms and verdicts, K=1..8", 1.0, exact_norms},
      {2, "lifted family: permutation mean is the cubic times I", 1.0, lifted_cubic},
      {3, "ratio ||W_SS||/||W_RS|| <= 0.999999 at eta=K^(-1/3), K=1..200", 10.0, ratio_bound},
      {4, "rank-deficient n=5 counterexample and its c*I perturbations", 60.0, rank_deficient_counterexample},
      {5, "2x2 norm formula, 2x2 radius identity, 3x3 failure", 30.0, radius_identities},
      {6, "two-matrix inequality: window suite and 2x2 PSD suite", 60.0, two_matrix_suites},
      {7, "degree-4 residual ratios within a x4 band", 30.0, residual_band},
      {8, "rank-one regression: ||W_RS|| <= ||W_GD|| and nonnegative bounds", 120.0, rank_one_regression},
      {9, "least-squares shuffling order, 100 runs", 120.0, shuffling_order},
      {10, "randomized search: hits at eta=1, none at eta=0.25", 300.0, random_search_replication},
      {11, "with/without-replacement operators and K=2 norm variants", 60.0, replacement_operators},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.time_limit_s) {
      o.pass = false;
      o.detail += "; over time limit " + fmt("%.0f s", c.time_limit_s);
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %2d: %s (%.2f s) -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
