#include "amgm/inequality.hpp"

#include <array>
#include <cmath>

#include "amgm/error.hpp"
#include "amgm/matcore.hpp"

namespace amgm {
namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 8> kVariantNames{{
    {Variant::MainSsRs, "main_ss_rs"},
    {Variant::MainRsGd, "main_rs_gd"},
    {Variant::RechtReM, "recht_re_m"},
    {Variant::SymmetrizedM, "symmetrized_m"},
    {Variant::EwoNormM, "ewo_norm_m"},
    {Variant::SymSsRs, "sym_ss_rs"},
    {Variant::NormSsRs, "norm_ss_rs"},
    {Variant::NormSymSsRs, "norm_sym_ss_rs"},
}};

void stamp(InequalityReport& r, const MatrixFamily& family, unsigned long long K, std::size_t m) {
  r.n = family.size();
  r.d = family.dim();
  r.K = K;
  r.m = m;
  r.eta_window = family.eta_window();
}

}  // namespace

std::string_view variant_name(Variant v) {
  for (const auto& [variant, name] : kVariantNames)
    if (variant == v) return name;
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (const auto& [variant, n] : kVariantNames)
    if (n == name) return variant;
  return std::nullopt;
}

InequalityReport make_report(Variant v, double lhs, double rhs, double tol) {
  if (!(tol >= 0.0)) throw LabError(ErrorKind::OutOfRange, "verdict tolerance must be >= 0");
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
    throw LabError(ErrorKind::NonFinite, "inequality sides must be finite");
  }
  InequalityReport r;
  r.variant = v;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.tolerance = tol;
  r.holds = r.margin >= -tol;
  r.tie = std::abs(r.margin) <= tol;
  return r;
}

std::pair<InequalityReport, InequalityReport> check_main(const MatrixFamily& family,
                                                         unsigned long long K, double tol) {
  const MeansTriple t = means_triple(family, K);
  auto first = make_report(Variant::MainSsRs, t.norm_ss, t.norm_rs, tol);
  auto second = make_report(Variant::MainRsGd, t.norm_rs, t.norm_gd, tol);
  stamp(first, family, K, family.size());
  stamp(second, family, K, family.size());
  return {first, second};
}

InequalityReport check_recht_re(const MatrixFamily& family, std::size_t m, double tol) {
  auto r = make_report(Variant::RechtReM, spectral_norm(ewo_mean(family, m)),
                       spectral_norm(ewr_mean(family, m)), tol);
  stamp(r, family, 1, m);
  return r;
}

InequalityReport check_symmetrized_m(const MatrixFamily& family, std::size_t m, double tol) {
  auto r = make_report(Variant::SymmetrizedM, spectral_norm(ewo_symmetrized_mean(family, m)),
                       spectral_norm(ewr_symmetrized_mean(family, m)), tol);
  stamp(r, family, 1, m);
  return r;
}

InequalityReport check_ewo_norm_m(const MatrixFamily& family, std::size_t m, double tol) {
  auto r = make_report(Variant::EwoNormM, ewo_norm_mean(family, m), ewr_norm_mean(family, m), tol);
  stamp(r, family, 1, m);
  return r;
}

std::vector<InequalityReport> check_all_variants(const MatrixFamily& family,
                                                 unsigned long long K,
                                                 const VariantOptions& options) {
  std::vector<InequalityReport> out;
  out.push_back(check_main(family, K, options.tol).first);

  const auto sym = symmetrized_means(family, K);
  auto sym_report = make_report(Variant::SymSsRs, spectral_norm(sym.left),
                                spectral_norm(sym.right), options.tol);
  stamp(sym_report, family, K, family.size());
  out.push_back(sym_report);

  for (bool symmetrized : {false, true}) {
    const auto e = norm_expectation_means(family, K, symmetrized, options.budget, options.seed,
                                          options.mc_samples);
    auto r = make_report(symmetrized ? Variant::NormSymSsRs : Variant::NormSsRs, e.left, e.right,
                         options.tol);
    r.estimated = e.right_estimated;
    r.stderr_estimate = e.right_stderr;
    stamp(r, family, K, family.size());
    out.push_back(r);
  }
  return out;
}

}  // namespace amgm
