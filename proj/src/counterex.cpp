#include "amgm/counterex.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "amgm/error.hpp"
#include "amgm/matcore.hpp"
#include "amgm/rng.hpp"

namespace amgm {

std::string_view source_name(CounterexampleSource s) {
  switch (s) {
    case CounterexampleSource::AppendixA: return "appendix_a";
    case CounterexampleSource::DeSa: return "desa";
    case CounterexampleSource::RandomSearch: return "random_search";
  }
  return "unknown";
}

MatrixFamily appendix_a_family() {
  const double r3 = std::sqrt(3.0);
  std::vector<DenseMatrix> members{
      DenseMatrix::from_rows({{0.25, r3 / 4.0}, {r3 / 4.0, 0.75}}),
      DenseMatrix::from_rows({{0.25, -r3 / 4.0}, {-r3 / 4.0, 0.75}}),
      DenseMatrix::diagonal({1.0, 0.0}),
  };
  return MatrixFamily::make(std::move(members), 1.0);
}

MatrixFamily lifted_family(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw LabError(ErrorKind::OutOfRange, "eta must lie in [0, 1]");
  const auto base = appendix_a_family();
  const DenseMatrix id = DenseMatrix::identity(2);
  std::vector<DenseMatrix> members;
  for (const auto& a : base.members()) members.push_back((1.0 - eta) * id + eta * a);
  return MatrixFamily::make(std::move(members), eta);
}

double rs_polynomial(double eta) {
  return 1.0 + eta * (-1.5 + eta * (3.0 / 8.0 + eta / 16.0));
}

double rs_polynomial_root() { return -4.0 + 2.0 * std::sqrt(6.0); }

MatrixFamily desa_family(std::size_t n) {
  if (n < 2) throw LabError(ErrorKind::OutOfRange, "desa_family needs n >= 2");
  const double nd = static_cast<double>(n);
  const double diag = std::sqrt(nd - 1.0) / nd;
  const double off = -1.0 / (nd * std::sqrt(nd - 1.0));
  std::vector<DenseMatrix> members;
  for (std::size_t i = 0; i < n; ++i) {
    DenseMatrix a = DenseMatrix::identity(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const double yr = r == i ? diag : off;
        const double yc = c == i ? diag : off;
        a(r, c) += yc + yr;  // (1 y^T)_{rc} = y_c, (y 1^T)_{rc} = y_r
      }
    members.push_back(std::move(a));
  }
  return MatrixFamily::make(std::move(members));
}

std::pair<double, bool> desa_criterion(std::size_t n) {
  if (n < 2) throw LabError(ErrorKind::OutOfRange, "desa_criterion needs n >= 2");
  const double nd = static_cast<double>(n);
  const double value =
      std::abs(std::pow(1.0 + 1.0 / (nd - 1.0), nd / 2.0) * std::cos(nd * std::asin(1.0 / std::sqrt(nd))));
  return {value, value > 1.0};
}

InequalityReport perturbation_break_check(std::size_t n, double c, double tol) {
  if (!(c >= 0.0)) throw LabError(ErrorKind::OutOfRange, "perturbation c must be >= 0");
  const auto base = desa_family(n);
  const DenseMatrix shift = c * DenseMatrix::identity(n);
  std::vector<DenseMatrix> members;
  for (const auto& a : base.members()) members.push_back(a + shift);
  return check_recht_re(MatrixFamily::make(std::move(members)), n, tol);
}

MatrixFamily random_search_family(std::size_t n, std::size_t d, double eta, std::uint64_t seed,
                                  std::uint64_t trial) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw LabError(ErrorKind::OutOfRange, "eta must lie in [0, 1]");
  const DenseMatrix id = DenseMatrix::identity(d);
  std::vector<DenseMatrix> members;
  members.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(seed, {trial, i});
    const DenseMatrix u = rng.gaussian_matrix(d, d);
    DenseMatrix m = u * u.transpose();
    // Exact symmetry regardless of summation order.
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = r + 1; c < d; ++c) m(c, r) = m(r, c);
    m *= 1.0 / spectral_norm(m);
    members.push_back((1.0 - eta) * id + eta * m);
  }
  return MatrixFamily::make(std::move(members));
}

SearchResult random_search(const SearchConfig& config) {
  if (config.trials < 1) throw LabError(ErrorKind::OutOfRange, "trials must be >= 1");
  if (config.n > kMaxEnumeratedMatrices) {
    throw LabError(ErrorKind::TooManyMatrices, "random_search is capped at n = 10");
  }
  std::vector<std::vector<CounterexampleReport>> per_trial(config.trials);

  auto run_trial = [&](std::uint64_t t) {
    auto family = random_search_family(config.n, config.d, config.eta, config.seed, t);
    std::vector<InequalityReport> reports;
    const auto [ss_rs, rs_gd] = check_main(family, config.K, config.tol);
    reports.push_back(ss_rs);
    reports.push_back(rs_gd);
    if (config.include_variants) {
      auto opts = config.variant_options;
      opts.tol = config.tol;
      for (auto& r : check_all_variants(family, config.K, opts)) {
        // main_ss_rs is already covered by check_main.
        if (r.variant != Variant::MainSsRs) reports.push_back(r);
      }
    }
    for (const auto& r : reports) {
      if (r.holds) continue;
      CounterexampleReport c;
      c.source = CounterexampleSource::RandomSearch;
      c.family = family;
      c.n = config.n;
      c.K = config.K;
      c.d = config.d;
      c.eta = config.eta;
      c.violated_variant = r.variant;
      c.margin = r.margin;
      c.trial_index = t;
      c.seed = config.seed;
      per_trial[t].push_back(std::move(c));
    }
  };

  const unsigned workers = std::max(1u, config.workers);
  if (workers == 1) {
    for (std::uint64_t t = 0; t < config.trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t t = w; t < config.trials; t += workers) run_trial(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SearchResult result;
  result.trials = config.trials;
  for (auto& v : per_trial) {
    if (!v.empty()) ++result.trials_with_violation;
    for (auto& c : v) result.violations.push_back(std::move(c));
  }
  return result;
}

SweepRow sweep_point(unsigned long long K, double eta) {
  const auto family = lifted_family(eta);
  const auto t = means_triple(family, K);
  // W_RS is the K-th power of the one-epoch mean, so it vanishes exactly when
  // that mean does; judging the base keeps the flag independent of K.
  const double base_norm = spectral_norm(permutation_mean(family));
  SweepRow row;
  row.eta = eta;
  row.K = K;
  row.norm_ss = t.norm_ss;
  row.norm_rs = t.norm_rs;
  row.infinite = base_norm <= kInfiniteRatioThreshold || t.norm_rs == 0.0;
  row.ratio = t.norm_rs > 0.0 ? t.norm_ss / t.norm_rs : std::numeric_limits<double>::infinity();
  return row;
}

std::vector<SweepRow> ratio_sweep(const std::vector<unsigned long long>& K_values,
                                  const std::vector<double>& eta_grid) {
  for (double eta : eta_grid) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw LabError(ErrorKind::OutOfRange, "eta grid must lie in [0, 1]");
  }
  std::vector<SweepRow> rows;
  rows.reserve(K_values.size() * eta_grid.size());
  for (auto K : K_values)
    for (double eta : eta_grid) rows.push_back(sweep_point(K, eta));
  return rows;
}

}  // namespace amgm
