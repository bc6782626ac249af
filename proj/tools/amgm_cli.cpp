// amgm: command-line driver for the permutation-product inequality lab.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "amgm/counterex.hpp"
#include "amgm/error.hpp"
#include "amgm/inequality.hpp"
#include "amgm/io.hpp"
#include "amgm/matcore.hpp"
#include "amgm/rng.hpp"
#include "amgm/sgdlab.hpp"
#include "amgm/theory.hpp"

namespace {

using namespace amgm;
using nlohmann::json;

constexpr int kExitHold = 0;
constexpr int kExitViolation = 1;
constexpr int kExitError = 2;

struct RunConfig {
  std::string subcommand;
  std::string family = "appendix_a";
  std::size_t n = 3;
  std::string K = "1";
  std::size_t d = 2;
  std::size_t m = 0;
  double eta = 1.0;
  std::string eta_grid = "0:1:0.01";
  std::uint64_t seed = 0;
  std::uint64_t trials = 1;
  std::uint64_t runs = 1;
  std::string out;
  std::string format = "csv";
  double tol = kDefaultVerdictTolerance;
  bool sequential = false;
  std::string which = "lemma3";
  bool all_variants = false;
  bool search_variants = false;
  bool zero_labels = false;

  // Which options the user set explicitly.
  bool has_n = false, has_d = false, has_eta = false, has_tol = false, has_K = false, has_m = false;
};

unsigned worker_count(const RunConfig& c) {
  if (c.sequential) return 1;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<unsigned long long> parse_k_list(const std::string& s) {
  std::vector<unsigned long long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double v = parse_double(item);
    if (!(v >= 1.0) || v != std::floor(v) || v > static_cast<double>(kMaxEpochs))
      throw LabError(ErrorKind::OutOfRange, "K values must be integers in [1, 1e6]");
    out.push_back(static_cast<unsigned long long>(v));
  }
  if (out.empty()) throw LabError(ErrorKind::ParseError, "empty K list");
  return out;
}

unsigned long long single_k(const RunConfig& c) {
  const auto ks = parse_k_list(c.K);
  if (ks.size() != 1) throw LabError(ErrorKind::ParseError, "this subcommand takes a single K");
  return ks.front();
}

std::vector<double> parse_eta_grid(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_double(item));
  if (parts.size() != 3) throw LabError(ErrorKind::ParseError, "eta grid must be a:b:step");
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0.0) || b < a) throw LabError(ErrorKind::OutOfRange, "eta grid needs a <= b and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i) grid.push_back(std::min(b, a + static_cast<double>(i) * step));
  return grid;
}

MatrixFamily resolve_family(const RunConfig& c) {
  const auto& spec = c.family;
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (spec == "appendix_a") return appendix_a_family();
  if (colon != std::string::npos) {
    if (head == "lifted") return lifted_family(parse_double(arg));
    if (head == "desa") return desa_family(static_cast<std::size_t>(parse_double(arg)));
    if (head == "random")
      return random_search_family(c.n, c.d, c.eta, static_cast<std::uint64_t>(parse_double(arg)), 0);
  }
  return read_family_file(spec);
}

Metadata base_metadata(const RunConfig& c) {
  Metadata m{
      {"tool", "amgm"},
      {"version", std::string(kToolVersion)},
      {"subcommand", c.subcommand},
      {"family", c.family},
      {"n", std::to_string(c.n)},
      {"K", c.K},
      {"d", std::to_string(c.d)},
      {"m", std::to_string(c.m)},
      {"eta", format_double(c.eta)},
      {"eta_grid", c.eta_grid},
      {"seed", std::to_string(c.seed)},
      {"trials", std::to_string(c.trials)},
      {"runs", std::to_string(c.runs)},
      {"tol", format_double(c.tol)},
      {"which", c.which},
      {"sequential", c.sequential ? "true" : "false"},
      {"generator", std::string(Rng::kGeneratorName)},
      {"permutation_order", "lexicographic"},
  };
  // Options a subcommand never reads are left out.
  auto drop = [&m](const std::string& key) {
    std::erase_if(m, [&](const auto& kv) { return kv.first == key; });
  };
  if (c.subcommand != "check") drop("family");
  if (c.subcommand != "sweep") drop("eta_grid");
  if (c.subcommand != "lemma") drop("which");
  return m;
}

void emit(const RunConfig& c, const Metadata& meta, const Table& table) {
  const Format f = parse_format(c.format);
  if (c.out.empty()) {
    write_table(std::cout, f, meta, table);
    return;
  }
  std::ofstream os(c.out);
  if (!os) throw LabError(ErrorKind::ParseError, "cannot write " + c.out);
  write_table(os, f, meta, table);
}

int verdict(const std::vector<InequalityReport>& reports) {
  for (const auto& r : reports)
    if (!r.holds) return kExitViolation;
  return kExitHold;
}

// ---- check ---------------------------------------------------------------

int cmd_check(const RunConfig& c) {
  const auto family = resolve_family(c);
  const auto K = single_k(c);
  std::vector<InequalityReport> reports;
  const auto [ss_rs, rs_gd] = check_main(family, K, c.tol);
  reports.push_back(ss_rs);
  reports.push_back(rs_gd);
  if (c.m > 0) {
    reports.push_back(check_recht_re(family, c.m, c.tol));
    reports.push_back(check_symmetrized_m(family, c.m, c.tol));
    reports.push_back(check_ewo_norm_m(family, c.m, c.tol));
  }
  if (c.all_variants) {
    VariantOptions opts;
    opts.seed = c.seed;
    opts.tol = c.tol;
    for (const auto& r : check_all_variants(family, K, opts))
      if (r.variant != Variant::MainSsRs) reports.push_back(r);
  }
  for (auto& r : reports) r.eta_window = family.eta_window();
  auto meta = base_metadata(c);
  meta.emplace_back("family_json", family_to_json(family).dump());
  emit(c, meta, reports_table(reports));
  return verdict(reports);
}

// ---- search --------------------------------------------------------------

int cmd_search(const RunConfig& c) {
  SearchConfig sc;
  sc.n = c.n;
  sc.K = single_k(c);
  sc.d = c.d;
  sc.eta = c.eta;
  sc.trials = c.trials;
  sc.seed = c.seed;
  sc.include_variants = c.search_variants;
  sc.variant_options.seed = c.seed;
  sc.tol = c.tol;
  sc.workers = worker_count(c);
  const auto result = random_search(sc);
  auto meta = base_metadata(c);
  meta.emplace_back("trials_with_violation", std::to_string(result.trials_with_violation));
  meta.emplace_back("sampler", "A_i=(1-eta)I+eta*UU^T/||UU^T||, U~N(0,1)^{dxd}, stream (seed,trial,i)");
  emit(c, meta, counterexample_table(result.violations));
  return result.violations.empty() ? kExitHold : kExitViolation;
}

// ---- sweep ---------------------------------------------------------------

int cmd_sweep(const RunConfig& c) {
  const auto rows = ratio_sweep(parse_k_list(c.K), parse_eta_grid(c.eta_grid));
  auto meta = base_metadata(c);
  meta.emplace_back("sweep_family", "lifted");
  emit(c, meta, sweep_table(rows));
  return kExitHold;
}

// ---- simulate ------------------------------------------------------------

int cmd_simulate(RunConfig c) {
  const auto K = single_k(c);
  if (!c.has_n) c.n = 20;
  if (!c.has_d) c.d = 30;
  if (!c.has_eta) c.eta = 0.5;
  const std::size_t n = c.n;
  const std::size_t d = c.d;
  const double eta = c.eta;
  if (c.runs < 1) throw LabError(ErrorKind::OutOfRange, "runs must be >= 1");

  std::vector<Table> per_run(c.runs, trajectory_table());
  std::vector<std::exception_ptr> errors(c.runs);
  const unsigned workers = worker_count(c);
  auto job = [&](std::uint64_t run) {
    try {
      const auto p = gaussian_problem(n, d, eta, K, derive_seed(c.seed, run, 0), c.zero_labels);
      Rng zr(derive_seed(c.seed, run, 1));
      const auto z0 = zr.gaussian_vector(d);
      for (Scheme s : kAllSchemes)
        append_trajectory_rows(per_run[run], run_scheme(p, s, derive_seed(c.seed, run, 2), z0), run);
    } catch (...) {
      errors[run] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::uint64_t r = w; r < c.runs; r += workers) job(r);
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  Table all = trajectory_table();
  for (auto& t : per_run)
    for (auto& row : t.rows) all.rows.push_back(std::move(row));

  const auto summary = ordering_experiment(n, d, eta, K, c.runs, c.seed, c.zero_labels, workers);
  auto meta = base_metadata(c);
  meta.emplace_back("zero_labels", c.zero_labels ? "true" : "false");
  meta.emplace_back("data", "x_i ~ N(0,I_d) normalized to unit length; y_i ~ N(0,1) unless zero labels");
  meta.emplace_back("init", "z0 ~ N(0,I_d), shared by all schemes, stream (seed,run,1)");
  meta.emplace_back("gd_step", "averaged gradient, z <- z - (eta/n) sum_i grad f_i");
  meta.emplace_back("win_ss_rs", format_double(summary.win_ss_rs));
  meta.emplace_back("win_rs_sgd", format_double(summary.win_rs_sgd));
  meta.emplace_back("win_rs_gd", format_double(summary.win_rs_gd));
  meta.emplace_back("proj_win_ss_rs", format_double(summary.proj_win_ss_rs));
  meta.emplace_back("proj_win_rs_sgd", format_double(summary.proj_win_rs_sgd));
  emit(c, meta, all);
  return kExitHold;
}

// ---- lemma ---------------------------------------------------------------

struct LemmaRow {
  std::uint64_t trial = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string status;  // holds | violated | inconclusive | skipped
};

std::vector<LemmaRow> run_lemma(const RunConfig& c, double tol) {
  std::vector<LemmaRow> rows;
  const std::string& w = c.which;
  auto add = [&](std::uint64_t t, double lhs, double rhs, bool ok) {
    rows.push_back({t, lhs, rhs, ok ? "holds" : "violated"});
  };
  for (std::uint64_t t = 0; t < c.trials; ++t) {
    Rng rng(c.seed, {t});
    if (w == "lemma3") {
      DenseMatrix q;
      do q = rng.gaussian_matrix(2, 2);
      while (std::abs(q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0)) < 1e-3);
      const auto l = DenseMatrix::diagonal({rng.uniform(), rng.uniform()});
      const auto [wr, half] = lemma3_check(q, l);
      add(t, wr, half, std::abs(wr - half) <= tol);
    } else if (w == "lemma6") {
      const double a = rng.normal(), b = rng.normal(), cc = rng.normal(), dd = rng.normal();
      const double th = rng.uniform(0.0, 2.0 * M_PI);
      const double f = lemma6_norm_formula(a, b, cc, dd, th);
      const double e = lemma6_norm_numeric(a, b, cc, dd, th);
      add(t, f, e, std::abs(f - e) <= tol * std::max(1.0, std::abs(e)));
    } else if (w == "lemma2" || w == "skew") {
      const auto K = single_k(c);
      const auto a = random_window_matrix(rng, c.d, K);
      const auto b = random_window_matrix(rng, c.d, K);
      if (w == "lemma2") {
        const auto x = matrix_power(a * b, K);
        add(t, min_eigenvalue(0.5 * (x + x.transpose())), 0.0, lemma2_check(a, b, K));
      } else {
        const double top = skew_square_max_eigenvalue(a, b, K);
        add(t, top, 0.0, top <= tol);
      }
    } else if (w == "theorem2") {
      const unsigned m = c.m > 0 ? static_cast<unsigned>(c.m) : 2;
      const unsigned long long K = 1ULL << m;
      const auto a = random_window_matrix(rng, c.d, K);
      const auto b = random_window_matrix(rng, c.d, K);
      const auto r = theorem2_check(a, b, m, tol);
      add(t, r.lhs, r.rhs, r.holds);
    } else if (w == "theorem3") {
      const auto a = random_psd_unit(rng, 2);
      const auto b = random_psd_unit(rng, 2);
      const auto r = theorem3_check(a, b, single_k(c), tol);
      add(t, r.lhs, r.rhs, r.holds);
    } else if (w == "lemma1") {
      std::vector<DenseMatrix> ms;
      for (std::size_t i = 0; i < c.n; ++i) ms.push_back(random_symmetric(rng, c.d));
      const auto chk = lemma1_expansion_check(MatrixFamily::make(std::move(ms)), single_k(c),
                                              {1e-2, 5e-3, 2.5e-3});
      const auto [lo, hi] =
          std::minmax_element(chk.residual_ratios.begin(), chk.residual_ratios.end());
      add(t, *hi, chk.band_factor * std::max(*lo, chk.vanishing_floor), chk.bounded);
    } else if (w == "theorem1") {
      std::vector<DenseMatrix> ms;
      for (std::size_t i = 0; i < c.n; ++i) ms.push_back(random_symmetric(rng, c.d));
      const auto mf = MatrixFamily::make(std::move(ms));
      if (!theorem1_condition(mf)) {
        rows.push_back({t, 0.0, 0.0, "skipped"});
        continue;
      }
      const auto desc = theorem1_descent(mf, single_k(c), {1e-1, 1e-2, 1e-3, 1e-4}, 1e-14);
      rows.push_back({t, desc.eta_star, 0.0, desc.found ? "holds" : "inconclusive"});
    } else if (w == "theorem4") {
      const std::size_t n = c.n;
      const double eta = c.has_eta ? c.eta : 1.0 / (6.0 * static_cast<double>(n));
      const auto x = sample_incoherent_vectors(rng, n, n, 0.1);
      if (x.empty()) {
        rows.push_back({t, 0.0, 0.0, "skipped"});
        continue;
      }
      const auto r = check_main(rank_one_family(x, eta), 1, tol).second;
      add(t, r.lhs, r.rhs, r.holds);
    } else {
      throw LabError(ErrorKind::ParseError, "unknown --which " + w);
    }
  }
  return rows;
}

int cmd_lemma(const RunConfig& c) {
  double tol = c.tol;
  if (!c.has_tol) {
    if (c.which == "lemma3") tol = 1e-8;
    if (c.which == "lemma6") tol = 1e-9;
  }
  const auto rows = run_lemma(c, tol);
  Table t;
  t.columns = {"which", "trial", "lhs", "rhs", "status"};
  bool violated = false;
  for (const auto& r : rows) {
    t.rows.push_back({c.which, r.trial, r.lhs, r.rhs, r.status});
    violated = violated || r.status == "violated";
  }
  auto meta = base_metadata(c);
  meta.emplace_back("tol_used", format_double(tol));
  emit(c, meta, t);
  return violated ? kExitViolation : kExitHold;
}

// ---- bounds --------------------------------------------------------------

int cmd_bounds(const RunConfig& c) {
  const std::size_t n_max = c.has_n ? c.n : 64;
  Table t;
  t.columns = {"n", "K", "eta", "delta", "s_min", "s_max", "rhs_gap_bound", "rhs_rs_bound"};
  bool negative = false;
  for (std::size_t n = 4; n <= n_max; ++n) {
    const double eta = c.has_eta ? c.eta : 1.0 / (6.0 * static_cast<double>(n));
    auto b = lemma4_canonical_bounds(n, eta);
    b.K = c.has_K ? single_k(c) : 1;
    t.rows.push_back({b.n, b.K, b.eta, b.delta, b.s_min, b.s_max, b.rhs_gap_bound, b.rhs_rs_bound});
    negative = negative || b.rhs_gap_bound < 0.0 || b.rhs_rs_bound < 0.0;
  }
  emit(c, base_metadata(c), t);
  return negative ? kExitViolation : kExitHold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix AM-GM / permutation-product inequality lab"};
  app.require_subcommand(1);
  RunConfig c;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--n", c.n, "number of matrices / data points");
    sub->add_option("--K", c.K, "epochs (sweep: comma-separated list)");
    sub->add_option("--d", c.d, "dimension");
    sub->add_option("--m", c.m, "product length / log2 K for theorem2");
    sub->add_option("--eta", c.eta, "step size or window parameter");
    sub->add_option("--seed", c.seed, "master seed");
    sub->add_option("--trials", c.trials, "trial count");
    sub->add_option("--runs", c.runs, "run count");
    sub->add_option("--out", c.out, "output path (default stdout)");
    sub->add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", c.tol, "verdict tolerance");
    sub->add_flag("--sequential", c.sequential, "single worker, canonical order");
  };

  auto* check = app.add_subcommand("check", "check inequalities on one family");
  common(check);
  check->add_option("--family", c.family, "appendix_a | lifted:eta | desa:n | random:seed | path.json");
  check->add_flag("--all-variants", c.all_variants, "also run the symmetrized and norm variants");

  auto* search = app.add_subcommand("search", "randomized counterexample search");
  common(search);
  search->add_flag("--variants", c.search_variants, "also test the variant inequalities");

  auto* sweep = app.add_subcommand("sweep", "norm ratio sweep over the lifted family");
  common(sweep);
  sweep->add_option("--eta-grid", c.eta_grid, "a:b:step");

  auto* simulate = app.add_subcommand("simulate", "GD / SGD / shuffling runs on least squares");
  common(simulate);
  simulate->add_flag("--zero-labels", c.zero_labels, "y_i = 0");

  auto* lemma = app.add_subcommand("lemma", "randomized checks of the proved statements");
  common(lemma);
  lemma->add_option("--which", c.which,
                    "lemma1 | theorem1 | lemma2 | theorem2 | theorem3 | lemma3 | lemma6 | skew | theorem4");

  auto* bounds = app.add_subcommand("bounds", "rank-one regression eigenvalue bounds for n = 4..N");
  common(bounds);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitHold : kExitError;
  }

  for (auto* sub : app.get_subcommands()) {
    c.subcommand = sub->get_name();
    c.has_n = sub->count("--n") > 0;
    c.has_d = sub->count("--d") > 0;
    c.has_eta = sub->count("--eta") > 0;
    c.has_tol = sub->count("--tol") > 0;
    c.has_K = sub->count("--K") > 0;
    c.has_m = sub->count("--m") > 0;
  }

  try {
    if (c.subcommand == "check") return cmd_check(c);
    if (c.subcommand == "search") return cmd_search(c);
    if (c.subcommand == "sweep") return cmd_sweep(c);
    if (c.subcommand == "simulate") return cmd_simulate(c);
    if (c.subcommand == "lemma") return cmd_lemma(c);
    if (c.subcommand == "bounds") return cmd_bounds(c);
  } catch (const LabError& e) {
    std::cerr << "error [" << error_kind_name(e.kind()) << "]: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
