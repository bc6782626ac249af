#include "amgm/sgdlab.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <functional>
#include <thread>

#include "amgm/error.hpp"
#include "amgm/matcore.hpp"
#include "amgm/rng.hpp"

namespace amgm {

namespace {

constexpr double kRankTolerance = 1e-12;
constexpr double kUnitTolerance = 1e-10;

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::size_t scheme_index(Scheme s) { return static_cast<std::size_t>(s); }

// Span coordinates u_i = Q^T x_i of every data vector.
std::vector<std::vector<double>> span_coordinates(const DenseMatrix& q,
                                                  const std::vector<std::vector<double>>& x) {
  std::vector<std::vector<double>> u(x.size(), std::vector<double>(q.cols(), 0.0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t c = 0; c < q.cols(); ++c)
      for (std::size_t r = 0; r < q.rows(); ++r) u[i][c] += q(r, c) * x[i][r];
  return u;
}

// R <- R - eta u (u^T R)
void rank_one_step(DenseMatrix& rmat, const std::vector<double>& u, double eta,
                   std::vector<double>& work) {
  const std::size_t r = rmat.rows();
  std::fill(work.begin(), work.end(), 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) work[j] += u[i] * rmat(i, j);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) rmat(i, j) -= eta * u[i] * work[j];
}

void run_workers(std::uint64_t count, unsigned workers,
                 const std::function<void(std::uint64_t)>& job) {
  workers = std::max(1u, workers);
  if (workers == 1) {
    for (std::uint64_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t i = w; i < count; i += workers) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

double RegressionProblem::loss(std::span<const double> z) const {
  double f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = dot(x_vectors[i], z) - y_labels[i];
    f += r * r;
  }
  return 0.5 * f;
}

void validate_problem(const RegressionProblem& p) {
  if (p.n == 0 || p.d == 0) throw LabError(ErrorKind::OutOfRange, "n and d must be positive");
  if (p.x_vectors.size() != p.n || p.y_labels.size() != p.n)
    throw LabError(ErrorKind::DimensionMismatch, "expected n vectors and n labels");
  if (!std::isfinite(p.eta)) throw LabError(ErrorKind::NonFinite, "eta must be finite");
  if (p.K == 0 || p.K > kMaxSgdEpochs) throw LabError(ErrorKind::OutOfRange, "K out of range");
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto& x = p.x_vectors[i];
    if (x.size() != p.d) throw LabError(ErrorKind::DimensionMismatch, "vector of wrong dimension");
    if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }) ||
        !std::isfinite(p.y_labels[i]))
      throw LabError(ErrorKind::NonFinite, "non-finite data");
    if (std::abs(std::sqrt(dot(x, x)) - 1.0) > kUnitTolerance)
      throw LabError(ErrorKind::NotUnitVector, "x_i must be unit length");
  }
}

RegressionProblem gaussian_problem(std::size_t n, std::size_t d, double eta, unsigned long long K,
                                   std::uint64_t seed, bool zero_labels) {
  if (n == 0 || d == 0) throw LabError(ErrorKind::OutOfRange, "n and d must be positive");
  RegressionProblem p;
  p.n = n;
  p.d = d;
  p.eta = eta;
  p.K = K;
  p.seed = seed;
  p.zero_labels = zero_labels;
  Rng rx(seed, {0});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x;
    double norm = 0.0;
    // A zero draw has probability zero; redraw rather than divide by it.
    while (norm == 0.0) {
      x = rx.gaussian_vector(d);
      norm = std::sqrt(dot(x, x));
    }
    for (auto& v : x) v /= norm;
    p.x_vectors.push_back(std::move(x));
  }
  Rng ry(seed, {1});
  p.y_labels.assign(n, 0.0);
  if (!zero_labels)
    for (auto& y : p.y_labels) y = ry.normal();
  validate_problem(p);
  return p;
}

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Gd: return "gd";
    case Scheme::Sgd: return "sgd";
    case Scheme::RandomShuffle: return "random_shuffle";
    case Scheme::SingleShuffle: return "single_shuffle";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes)
    if (scheme_name(s) == name) return s;
  return std::nullopt;
}

std::vector<std::size_t> scheme_schedule(const RegressionProblem& p, Scheme scheme,
                                         std::uint64_t seed) {
  std::vector<std::size_t> order;
  if (scheme == Scheme::Gd) return order;
  Rng rng(seed, {scheme_index(scheme)});
  order.reserve(p.n * p.K);
  switch (scheme) {
    case Scheme::Sgd:
      for (unsigned long long t = 0; t < p.n * p.K; ++t) order.push_back(rng.below(p.n));
      break;
    case Scheme::RandomShuffle:
      for (unsigned long long k = 0; k < p.K; ++k) {
        const auto perm = rng.permutation(p.n);
        order.insert(order.end(), perm.begin(), perm.end());
      }
      break;
    case Scheme::SingleShuffle: {
      const auto perm = rng.permutation(p.n);
      for (unsigned long long k = 0; k < p.K; ++k) order.insert(order.end(), perm.begin(), perm.end());
      break;
    }
    case Scheme::Gd: break;
  }
  return order;
}

std::vector<double> run_schedule(const RegressionProblem& p, std::span<const std::size_t> order,
                                 std::span<const double> z0) {
  if (z0.size() != p.d) throw LabError(ErrorKind::DimensionMismatch, "z0 must have dimension d");
  std::vector<double> z(z0.begin(), z0.end());
  for (std::size_t i : order) {
    if (i >= p.n) throw LabError(ErrorKind::IndexOutOfRange, "schedule index out of range");
    const auto& x = p.x_vectors[i];
    const double g = p.eta * (dot(x, z) - p.y_labels[i]);
    for (std::size_t r = 0; r < p.d; ++r) z[r] -= g * x[r];
  }
  return z;
}

DenseMatrix span_basis(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) return {};
  const std::size_t d = vectors.front().size();
  std::vector<std::vector<double>> basis;
  for (const auto& v : vectors) {
    if (v.size() != d) throw LabError(ErrorKind::DimensionMismatch, "vectors differ in dimension");
    std::vector<double> w(v);
    const double original = std::sqrt(dot(w, w));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) {
        const double c = dot(q, w);
        for (std::size_t r = 0; r < d; ++r) w[r] -= c * q[r];
      }
    const double norm = std::sqrt(dot(w, w));
    if (norm <= kRankTolerance * std::max(1.0, original)) continue;
    for (auto& e : w) e /= norm;
    basis.push_back(std::move(w));
  }
  DenseMatrix q(d, basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c)
    for (std::size_t r = 0; r < d; ++r) q(r, c) = basis[c][r];
  return q;
}

Trajectory run_scheme(const RegressionProblem& p, Scheme scheme, std::uint64_t seed,
                      std::span<const double> z0, bool record_proj_norms) {
  validate_problem(p);
  if (z0.size() != p.d) throw LabError(ErrorKind::DimensionMismatch, "z0 must have dimension d");

  Trajectory tr;
  tr.scheme = scheme;
  tr.seed = seed;
  const std::size_t steps = p.n * p.K;
  tr.losses.reserve(steps + 1);

  const DenseMatrix q = span_basis(p.x_vectors);
  const std::size_t r = q.cols();
  const auto u = span_coordinates(q, p.x_vectors);
  DenseMatrix rmat = DenseMatrix::identity(r);
  std::vector<double> work(r);

  std::vector<double> z(z0.begin(), z0.end());
  tr.losses.push_back(p.loss(z));
  if (record_proj_norms) tr.proj_norms.push_back(r ? spectral_norm(rmat) : 0.0);

  if (scheme == Scheme::Gd) {
    const double step = p.eta / static_cast<double>(p.n);
    DenseMatrix g = DenseMatrix::identity(r);
    for (const auto& ui : u)
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) g(a, b) -= step * ui[a] * ui[b];
    DenseMatrix next(r, r);
    std::vector<double> grad(p.d);
    for (std::size_t t = 0; t < steps; ++t) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = 0; i < p.n; ++i) {
        const auto& x = p.x_vectors[i];
        const double res = dot(x, z) - p.y_labels[i];
        for (std::size_t k = 0; k < p.d; ++k) grad[k] += res * x[k];
      }
      for (std::size_t k = 0; k < p.d; ++k) z[k] -= step * grad[k];
      multiply_into(g, rmat, next);
      std::swap(rmat, next);
      tr.losses.push_back(p.loss(z));
      if (record_proj_norms) tr.proj_norms.push_back(spectral_norm(rmat));
    }
  } else {
    const auto order = scheme_schedule(p, scheme, seed);
    for (std::size_t i : order) {
      const auto& x = p.x_vectors[i];
      const double g = p.eta * (dot(x, z) - p.y_labels[i]);
      for (std::size_t k = 0; k < p.d; ++k) z[k] -= g * x[k];
      rank_one_step(rmat, u[i], p.eta, work);
      tr.losses.push_back(p.loss(z));
      if (record_proj_norms) tr.proj_norms.push_back(spectral_norm(rmat));
    }
  }
  tr.final_proj_norm = record_proj_norms ? tr.proj_norms.back() : (r ? spectral_norm(rmat) : 0.0);
  tr.final_iterate = std::move(z);
  return tr;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run, std::uint64_t slot) {
  return Rng(seed, {run, slot}).next_u64();
}

OrderingSummary ordering_experiment(std::size_t n, std::size_t d, double eta, unsigned long long K,
                                    std::uint64_t runs, std::uint64_t seed, bool zero_labels,
                                    unsigned workers) {
  if (runs < 1) throw LabError(ErrorKind::OutOfRange, "runs must be >= 1");
  OrderingSummary s;
  s.n = n;
  s.d = d;
  s.eta = eta;
  s.K = K;
  s.runs = runs;
  s.seed = seed;
  s.zero_labels = zero_labels;
  s.outcomes.resize(runs);

  run_workers(runs, workers, [&](std::uint64_t run) {
    RunOutcome& o = s.outcomes[run];
    o.run = run;
    o.problem_seed = derive_seed(seed, run, 0);
    const auto p = gaussian_problem(n, d, eta, K, o.problem_seed, zero_labels);
    Rng zr(derive_seed(seed, run, 1));
    const auto z0 = zr.gaussian_vector(d);
    const std::uint64_t scheme_seed = derive_seed(seed, run, 2);
    for (Scheme sc : kAllSchemes) {
      const auto tr = run_scheme(p, sc, scheme_seed, z0, false);
      o.final_loss[scheme_index(sc)] = tr.losses.back();
      o.final_proj_norm[scheme_index(sc)] = tr.final_proj_norm;
    }
  });

  const std::size_t gd = scheme_index(Scheme::Gd), sgd = scheme_index(Scheme::Sgd),
                    rs = scheme_index(Scheme::RandomShuffle),
                    ss = scheme_index(Scheme::SingleShuffle);
  const double inv = 1.0 / static_cast<double>(runs);
  for (const auto& o : s.outcomes) {
    s.win_ss_rs += (o.final_loss[ss] <= o.final_loss[rs]) * inv;
    s.win_rs_sgd += (o.final_loss[rs] <= o.final_loss[sgd]) * inv;
    s.win_rs_gd += (o.final_loss[rs] <= o.final_loss[gd]) * inv;
    s.proj_win_ss_rs += (o.final_proj_norm[ss] <= o.final_proj_norm[rs]) * inv;
    s.proj_win_rs_sgd += (o.final_proj_norm[rs] <= o.final_proj_norm[sgd]) * inv;
    s.proj_win_rs_gd += (o.final_proj_norm[rs] <= o.final_proj_norm[gd]) * inv;
  }
  for (Scheme sc : kAllSchemes) {
    std::vector<double> v;
    for (const auto& o : s.outcomes) v.push_back(o.final_loss[scheme_index(sc)]);
    s.median_final_loss[scheme_index(sc)] = median(std::move(v));
  }
  return s;
}

}  // namespace amgm
