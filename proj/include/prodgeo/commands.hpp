#pragma once

// analyze / verify / construct: sample an immersion, run the residual
// suites and collect a Report.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "prodgeo/catalog.hpp"
#include "prodgeo/equations.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/flat_normal.hpp"
#include "prodgeo/geometry.hpp"
#include "prodgeo/principal.hpp"
#include "prodgeo/report.hpp"
#include "prodgeo/sampling.hpp"
#include "prodgeo/spec_file.hpp"
#include "prodgeo/warped.hpp"

namespace prodgeo {

/// Bad command line or configuration (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Every tolerance a run may override with --tol NAME=V, and its default.
inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"alpha_T", kVerticalTol},
      {"class_a", kClassATol},
      {"cluster", kDefaultClusterTol},
      {"codazzi", kCodazziTol},
      {"codazzi_flat", kCodazziFlatTol},
      {"distribution", 1e-5},
      {"einstein", kEinsteinTol},
      {"expected", 1e-6},
      {"flatness", kDefaultFlatTol},
      {"gauss", kGaussTol},
      {"identity", 1e-6},
      {"lift", kLiftTol},
      {"minimal", kMinimalTol},
      {"nabla_T", kVerticalTol},
      {"parallel_h", kParallelHTol},
      {"parallelism", 1e-5},
      {"psi", 1e-14},
      {"pullback", kPullbackTol},
      {"reconstruction", 1e-7},
      {"ricci_bound", 1e-6},
      {"ricci_equation", kRicciEquationTol},
      {"ricci_tensor", kRicciTensorTol},
      {"sphere_constraint", 1e-9},
  };
  return t;
}

struct RunConfig {
  enum class Source { catalog, spec_file, spec };
  enum class Format { json, csv };

  Source source = Source::catalog;
  std::string catalog_name;
  catalog::Params params;
  std::string spec_path;
  std::optional<ParsedSpec> spec;  // Source::spec
  int samples = 30;
  std::uint64_t seed = 1;
  std::map<std::string, double> tol_overrides;
  Format format = Format::json;
  std::string out;          // empty: stdout
  std::string export_path;  // construct only

  double tol(const std::string& name) const {
    const auto it = tol_overrides.find(name);
    return it != tol_overrides.end() ? it->second : default_tolerances().at(name);
  }
};

inline void validate_config(const RunConfig& c) {
  if (c.samples < 1) throw UsageError("--samples must be at least 1");
  for (const auto& [k, v] : c.tol_overrides) {
    if (default_tolerances().count(k) == 0) throw UsageError("unknown tolerance '" + k + "'");
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("tolerance '" + k + "' must be positive");
  }
  if (c.source == RunConfig::Source::catalog && c.catalog_name.empty()) {
    throw UsageError("no immersion given: use --catalog NAME or --spec FILE");
  }
}

/// Spec of the run, whatever its source.
inline ParsedSpec resolve_spec(const RunConfig& c) {
  switch (c.source) {
    case RunConfig::Source::spec_file:
      return load_spec_file(c.spec_path);
    case RunConfig::Source::spec:
      if (!c.spec) throw UsageError("missing spec");
      return *c.spec;
    case RunConfig::Source::catalog:
      break;
  }
  ParsedSpec s;
  s.kind = "catalog";
  s.name = c.catalog_name;
  s.params = c.params;
  const ParametricImmersion f = catalog::make(s.name, s.params);
  s.echo["ambient"] = {{"epsilon", f.space().epsilon()}, {"n", f.space().n()}};
  s.echo["kind"] = "catalog";
  s.echo["name"] = s.name;
  s.echo["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.params) s.echo["params"][k] = v;
  return s;
}

namespace detail {

inline nlohmann::ordered_json config_echo(const RunConfig& c, const ParsedSpec& s,
                                          const std::vector<std::string>& tol_names) {
  nlohmann::ordered_json j;
  j["spec"] = s.echo;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["tolerances"] = nlohmann::ordered_json::object();
  for (const auto& n : tol_names) j["tolerances"][n] = c.tol(n);
  j["format"] = c.format == RunConfig::Format::json ? "json" : "csv";
  return j;
}

inline nlohmann::ordered_json immersion_echo(const ParametricImmersion& f) {
  nlohmann::ordered_json j;
  j["name"] = f.name();
  j["dim"] = f.dim();
  j["ambient"] = {{"epsilon", f.space().epsilon()}, {"n", f.space().n()}};
  j["chart"] = {{"lower", f.chart().lower}, {"upper", f.chart().upper}};
  return j;
}

inline nlohmann::ordered_json json_vec(const Vecd& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (double x : v) a.push_back(finite_or_null(x));
  return a;
}

inline const std::vector<std::string>& verify_tol_names() {
  static const std::vector<std::string> n{"gauss", "codazzi", "ricci_equation", "nabla_T", "alpha_T",
                                          "ricci_tensor"};
  return n;
}

/// Fundamental-equation suite: at each sample, three random unit triples
/// (and normal pairs) for Gauss, Codazzi and the Ricci equation; frame
/// directions for the vertical-field equations; the full Ricci tensor.
inline std::vector<CheckRecord> equation_suite(const ParametricImmersion& f,
                                               const std::vector<Vecd>& samples, const RunConfig& c,
                                               nlohmann::ordered_json& summary) {
  double gauss = 0.0, codazzi = 0.0, ricci_eq = 0.0, nabla_t = 0.0, alpha_t = 0.0, ric = 0.0;
  double ricci_lhs = 0.0;
  int normal_samples = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const LocalGeometry lg(f, samples[k]);
    const PointGeometry& pg = lg.point();
    DirectionSampler ds(c.seed, k);
    for (int rep = 0; rep < 3; ++rep) {
      const Vecd x = ds.unit(pg.m), y = ds.unit(pg.m), z = ds.unit(pg.m);
      gauss = std::max(gauss, norm(gauss_residual(lg, x, y, z)));
      codazzi = std::max(codazzi, norm(codazzi_residual(lg, x, y, z)));
      if (pg.normal_rank >= 2) {
        const Vecd xi = ds.unit(pg.normal_rank), zeta = ds.unit(pg.normal_rank);
        const auto [l, r] = ricci_equation_sides(lg, x, y, xi, zeta);
        ricci_eq = std::max(ricci_eq, std::abs(l - r));
        ricci_lhs = std::max(ricci_lhs, std::abs(l));
      }
    }
    if (pg.normal_rank >= 2) ++normal_samples;
    const auto v = vertical_field_residuals(lg);
    nabla_t = std::max(nabla_t, v.nabla_t.max_abs);
    alpha_t = std::max(alpha_t, v.alpha_t.max_abs);
    ric = std::max(ric, ricci_tensor_residual(lg));
  }
  const int n = static_cast<int>(samples.size());
  std::vector<CheckRecord> out;
  out.push_back(gated_check("gauss", gauss, c.tol("gauss"), n));
  out.push_back(gated_check("codazzi", codazzi, c.tol("codazzi"), n));
  if (normal_samples > 0) {
    out.push_back(gated_check("ricci_equation", ricci_eq, c.tol("ricci_equation"), n));
  } else {
    CheckRecord r = gated_check("ricci_equation", 0.0, c.tol("ricci_equation"), n,
                                "codimension 1: both sides vanish identically");
    out.push_back(r);
  }
  out.push_back(gated_check("nabla_T", nabla_t, c.tol("nabla_T"), n));
  out.push_back(gated_check("alpha_T", alpha_t, c.tol("alpha_T"), n));
  out.push_back(gated_check("ricci_tensor", ric, c.tol("ricci_tensor"), n));
  summary["max_normal_curvature"] = ricci_lhs;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline Report cmd_verify(const RunConfig& c) {
  validate_config(c);
  const ParsedSpec spec = resolve_spec(c);
  const ParametricImmersion f = build_from_spec(spec);
  Report rep;
  rep.command = "verify";
  rep.config = detail::config_echo(c, spec, detail::verify_tol_names());
  rep.immersion = detail::immersion_echo(f);
  const auto samples = sample_chart(f.chart(), c.samples, c.seed);
  nlohmann::ordered_json summary;
  rep.checks = detail::equation_suite(f, samples, c, summary);
  rep.summaries["equations"] = summary;
  return rep;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

namespace detail {

inline const std::vector<std::string>& analyze_tol_names() {
  static const std::vector<std::string> n{
      "flatness", "cluster",   "reconstruction", "class_a",     "codazzi_flat",
      "lift",     "einstein",  "parallel_h",     "identity",    "parallelism",
      "distribution", "minimal", "ricci_bound",  "expected"};
  return n;
}

struct SampleAnalysis {
  bool flat = false;
  double commutator = 0.0;  // relative to max ||A||_F^2
  double h_norm = 0.0;
  double t_norm = 0.0;
  double eta_norm = 0.0;
  std::optional<PrincipalDecomposition> dec;
  std::optional<ClassAResult> class_a;
  double codazzi_flat = 0.0;
  std::optional<double> lifted;
  bool lifted_t_block = false;
  double parallel_h = 0.0;
  std::optional<double> parallelism;
  std::optional<DistributionReport> distribution;
  std::optional<IdentityReport> identity;
  std::string error;
};

inline nlohmann::ordered_json decomposition_summary(const PrincipalDecomposition& d) {
  nlohmann::ordered_json j;
  j["s"] = d.s;
  j["dims"] = d.dims;
  Vecd norms;
  for (const auto& x : d.xi) norms.push_back(norm(x));
  j["xi_norms"] = json_vec(norms);
  j["gap"] = finite_or_null(d.gap);
  j["t_index"] = d.t_index ? nlohmann::ordered_json(*d.t_index) : nlohmann::ordered_json(nullptr);
  j["reconstruction_residual"] = d.reconstruction_residual;
  return j;
}

inline nlohmann::ordered_json identity_summary(const IdentityReport& r) {
  nlohmann::ordered_json j;
  j["lambda"] = r.lambda;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : r.entries) {
    j["entries"].push_back({{"k", e.k},
                            {"applicable", e.applicable},
                            {"lhs", e.lhs},
                            {"rhs", e.rhs},
                            {"residual", e.residual},
                            {"mxi_lhs", e.mxi_lhs},
                            {"mxi_rhs", e.mxi_rhs},
                            {"mxi_residual", e.mxi_residual}});
  }
  return j;
}

/// Compares an observed sorted list with the expected one.
inline double list_deviation(std::vector<double> got, std::vector<double> want) {
  if (got.size() != want.size()) return std::numeric_limits<double>::infinity();
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  double r = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) r = std::max(r, std::abs(got[i] - want[i]));
  return r;
}

}  // namespace detail

inline Report cmd_analyze(const RunConfig& c) {
  using detail::SampleAnalysis;
  validate_config(c);
  const ParsedSpec spec = resolve_spec(c);
  const ParametricImmersion f = build_from_spec(spec);
  Report rep;
  rep.command = "analyze";
  rep.config = detail::config_echo(c, spec, detail::analyze_tol_names());
  rep.immersion = detail::immersion_echo(f);
  const auto samples = sample_chart(f.chart(), c.samples, c.seed);
  const int n = static_cast<int>(samples.size());

  // Pass 1: pointwise structure and the Ricci tensor for the Einstein fit.
  std::vector<SampleAnalysis> sa(samples.size());
  std::vector<Matd> ricci;
  std::vector<std::optional<LocalGeometry>> lgs(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    auto& a = sa[k];
    try {
      lgs[k].emplace(f, samples[k]);
      const LocalGeometry& lg = *lgs[k];
      const PointGeometry& pg = lg.point();
      ricci.push_back(extrinsic_ricci(pg));
      const FlatnessResult fl = flatness_test(pg, c.tol("flatness"));
      a.flat = fl.is_flat;
      a.commutator = fl.scale > 0.0 ? fl.max_commutator / fl.scale : 0.0;
      a.h_norm = norm(pg.H);
      a.t_norm = norm(pg.T);
      a.eta_norm = norm(pg.eta);
      a.parallel_h = mean_curvature_derivative(lg);
      if (!a.flat) {
        a.class_a = class_a_test(pg, c.tol("class_a"));
        continue;
      }
      a.dec = principal_decomposition(pg, c.tol("cluster"), 0x5eed + c.seed);
      a.class_a = class_a_test(pg, c.tol("class_a"), &*a.dec);
      const auto cf = codazzi_flat_residual(lg, *a.dec);
      for (double v : cf) a.codazzi_flat = std::max(a.codazzi_flat, v);
      a.parallelism = parallelism_residual(lg, *a.dec);
      if (a.class_a->is_class_a) {
        const LiftedDecomposition ld = lifted_decomposition(lg, *a.dec, true);
        a.lifted = ld.max_residual();
        a.lifted_t_block = ld.includes_t_block;
        if (!a.class_a->t_vanishes) a.distribution = distribution_checks(lg, *a.dec);
      }
    } catch (const Error& e) {
      a.error = e.what();
    }
  }

  int errors = 0;
  std::string first_error;
  for (const auto& a : sa)
    if (!a.error.empty()) {
      if (errors++ == 0) first_error = a.error;
    }
  if (errors > 0) {
    CheckRecord r = gated_check("sample_errors", errors, 0.5, n, first_error);
    rep.checks.push_back(r);
  }

  auto max_over = [&](auto get) {
    double r = 0.0;
    for (const auto& a : sa)
      if (a.error.empty()) r = std::max(r, get(a));
    return r;
  };
  bool all_flat = true;
  bool any_t = false;
  bool all_class_a = true;
  for (const auto& a : sa) {
    if (!a.error.empty()) continue;
    all_flat = all_flat && a.flat;
    any_t = any_t || a.t_norm > kTZeroTol;
    all_class_a = all_class_a && a.class_a && a.class_a->is_class_a;
  }
  const double max_h = max_over([](const SampleAnalysis& a) { return a.h_norm; });
  const double max_dh = max_over([](const SampleAnalysis& a) { return a.parallel_h; });

  // Flatness.
  {
    CheckRecord r = gated_check("flatness", max_over([](const SampleAnalysis& a) { return a.commutator; }),
                                c.tol("flatness"), n, "max ||[A_xi, A_zeta]||_F / max ||A||_F^2");
    rep.checks.push_back(r);
  }

  // Principal decomposition.
  if (all_flat) {
    rep.checks.push_back(gated_check(
        "reconstruction",
        max_over([](const SampleAnalysis& a) { return a.dec ? a.dec->reconstruction_residual : 0.0; }),
        c.tol("reconstruction"), n));
    rep.checks.push_back(gated_check(
        "codazzi_flat", max_over([](const SampleAnalysis& a) { return a.codazzi_flat; }),
        c.tol("codazzi_flat"), n));
  } else {
    rep.checks.push_back(skipped_check("reconstruction", c.tol("reconstruction"), "normal bundle not flat"));
    rep.checks.push_back(skipped_check("codazzi_flat", c.tol("codazzi_flat"), "normal bundle not flat"));
  }

  // Class A.
  {
    const double defect = max_over([](const SampleAnalysis& a) { return a.class_a ? a.class_a->defect : 0.0; });
    std::string note = any_t ? "" : "T vanishes at every sample (vacuously class A)";
    if (all_flat) {
      CheckRecord r = gated_check("class_a", defect, c.tol("class_a"), n, note);
      if (!all_class_a) {
        r.pass = false;
        r.status = "failed";
      }
      rep.checks.push_back(r);
    } else {
      rep.checks.push_back(info_check("class_a", defect, c.tol("class_a"), n, "normal bundle not flat"));
    }
  }

  // Lifted decomposition.
  if (all_flat && all_class_a) {
    std::string note = any_t ? "" : "T vanishes: span{T} block omitted";
    rep.checks.push_back(gated_check("lifted_decomposition",
                                     max_over([](const SampleAnalysis& a) { return a.lifted.value_or(0.0); }),
                                     c.tol("lift"), n, note));
  } else {
    rep.checks.push_back(skipped_check("lifted_decomposition", c.tol("lift"),
                                       all_flat ? "not class A" : "normal bundle not flat"));
  }

  // Einstein fit (informational).
  EinsteinFit fit;
  if (!ricci.empty()) {
    fit = einstein_fit(ricci, c.tol("einstein"));
    rep.checks.push_back(info_check("einstein", fit.max_dev, c.tol("einstein"), fit.samples,
                                    "max |Ric - lambda_hat g|"));
    rep.summaries["einstein_fit"] = {{"lambda_hat", fit.lambda_hat},
                                     {"max_dev", fit.max_dev},
                                     {"is_einstein", fit.is_einstein},
                                     {"samples", fit.samples}};
  }

  // Identity, parallelism and distributions: gated when the hypotheses hold.
  const bool parallel_h = max_dh < c.tol("parallel_h");
  const bool hyp = all_flat && fit.is_einstein && parallel_h;
  const std::string hyp_note =
      hyp ? "" : "hypotheses not met (Einstein, flat normal bundle, parallel H); reported only";
  rep.checks.push_back(info_check("parallel_mean_curvature", max_dh, c.tol("parallel_h"), n,
                                  "max ||nabla^perp H||"));
  if (all_flat) {
    double id_res = 0.0;
    double min_rhs = std::numeric_limits<double>::infinity();
    std::optional<IdentityReport> first;
    for (std::size_t k = 0; k < sa.size(); ++k) {
      auto& a = sa[k];
      if (!a.error.empty() || !a.dec) continue;
      a.identity = xi_identity_report(lgs[k]->point(), *a.dec, fit.lambda_hat);
      id_res = std::max(id_res, a.identity->max_residual());
      min_rhs = std::min(min_rhs, a.identity->min_rhs());
      if (!first) first = a.identity;
    }
    auto make = [&](std::string name, double v, double tol, std::string note) {
      return hyp ? gated_check(std::move(name), v, tol, n, std::move(note))
                 : info_check(std::move(name), v, tol, n, hyp_note);
    };
    rep.checks.push_back(make("xi_identity", id_res, c.tol("identity"), ""));
    const double neg = std::isfinite(min_rhs) ? std::max(0.0, -min_rhs) : 0.0;
    rep.checks.push_back(make("xi_identity_rhs_sign", neg, 1e-9, "max(0, -RHS)"));
    if (first) rep.summaries["identity_report"] = detail::identity_summary(*first);
    rep.checks.push_back(make("parallelism",
                              max_over([](const SampleAnalysis& a) { return a.parallelism.value_or(0.0); }),
                              c.tol("parallelism"), "max ||nabla^perp_Z xi_i||, Z orthogonal to T"));
    if (!any_t) {
      rep.checks.push_back(skipped_check("distribution", c.tol("distribution"), "T≈0"));
    } else if (!all_class_a) {
      rep.checks.push_back(skipped_check("distribution", c.tol("distribution"), "not class A"));
    } else {
      double d = 0.0;
      double angle = std::numeric_limits<double>::infinity();
      int skipped = 0;
      for (const auto& a : sa) {
        if (!a.distribution) {
          ++skipped;
          continue;
        }
        d = std::max(d, a.distribution->max_residual());
        angle = std::min(angle, a.distribution->min_independence_angle);
      }
      std::string note = skipped > 0 ? std::to_string(skipped) + " samples with T≈0 skipped" : "";
      rep.checks.push_back(make("distribution", d, c.tol("distribution"), note));
      rep.summaries["distribution"] = {{"max_residual", d}, {"min_independence_angle", finite_or_null(angle)}};
    }
  } else {
    for (const char* name : {"xi_identity", "parallelism", "distribution"}) {
      rep.checks.push_back(skipped_check(name, c.tol(name == std::string("xi_identity") ? "identity" : name),
                                         "normal bundle not flat"));
    }
  }

  // Ricci bound for minimal immersions.
  if (max_h < c.tol("minimal") && errors == 0) {
    const MinimalRicciBound mb = minimal_ricci_bound(f, samples, c.tol("minimal"));
    CheckRecord r = gated_check("minimal_ricci_bound", std::max(0.0, mb.gap), c.tol("ricci_bound"), n,
                                mb.is_slice_equality ? "equality: open subset of a slice" : "");
    rep.checks.push_back(r);
    rep.summaries["minimal_ricci_bound"] = {{"max_ricci", mb.max_ricci},
                                            {"gap", mb.gap},
                                            {"is_slice_equality", mb.is_slice_equality}};
  } else {
    rep.checks.push_back(skipped_check("minimal_ricci_bound", c.tol("ricci_bound"), "not minimal"));
  }

  // Expected closed-form metadata.
  {
    const ExpectedAnalytics& e = f.expected();
    const double tol = c.tol("expected");
    double dev = 0.0;
    std::vector<std::string> bad;
    auto flag = [&](const char* name, const std::optional<bool>& want, bool got) {
      if (want && *want != got) bad.push_back(name);
    };
    if (e.einstein_constant) {
      const double d = std::abs(fit.lambda_hat - *e.einstein_constant);
      dev = std::max(dev, d);
      if (d > tol) bad.push_back("einstein_constant");
    }
    flag("einstein", e.einstein, fit.is_einstein);
    flag("flat_normal", e.flat_normal, all_flat);
    flag("class_a", e.class_a, all_flat && all_class_a);
    flag("minimal", e.minimal, max_h < c.tol("minimal"));
    for (const auto& a : sa) {
      if (!a.dec) continue;
      if (e.num_principal && a.dec->s != *e.num_principal) {
        bad.push_back("num_principal");
        break;
      }
      if (!e.dims.empty()) {
        auto dims = a.dec->dims;
        std::sort(dims.begin(), dims.end());
        if (dims != e.dims) {
          bad.push_back("dims");
          break;
        }
      }
      if (!e.xi_norms.empty()) {
        Vecd norms;
        for (const auto& x : a.dec->xi) norms.push_back(norm(x));
        const double d = detail::list_deviation(norms, e.xi_norms);
        dev = std::max(dev, d);
        if (d > tol) {
          bad.push_back("xi_norms");
          break;
        }
      }
    }
    std::string note;
    for (const auto& b : bad) note += (note.empty() ? "mismatch: " : ", ") + b;
    CheckRecord r = gated_check("expected_metadata", dev, tol, n, note);
    if (!bad.empty()) {
      r.pass = false;
      r.status = "failed";
    }
    rep.checks.push_back(r);
  }

  // Summaries.
  {
    nlohmann::ordered_json pd;
    int smin = 0, smax = 0;
    bool have = false;
    for (const auto& a : sa) {
      if (!a.dec) continue;
      if (!have) pd["first_sample"] = detail::decomposition_summary(*a.dec);
      smin = have ? std::min(smin, a.dec->s) : a.dec->s;
      smax = have ? std::max(smax, a.dec->s) : a.dec->s;
      have = true;
    }
    if (have) {
      pd["s_min"] = smin;
      pd["s_max"] = smax;
      rep.summaries["principal_decomposition"] = pd;
    }
    rep.summaries["class_a"] = {
        {"verdict", all_flat && all_class_a},
        {"max_defect", max_over([](const SampleAnalysis& a) { return a.class_a ? a.class_a->defect : 0.0; })},
        {"t_vanishes_everywhere", !any_t}};
    rep.summaries["vertical"] = {{"max_t_norm", max_over([](const SampleAnalysis& a) { return a.t_norm; })},
                                 {"max_eta_norm", max_over([](const SampleAnalysis& a) { return a.eta_norm; })}};
    rep.summaries["max_mean_curvature"] = max_h;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

struct ConstructResult {
  Report report;
  std::vector<Vecd> params;  // chart samples
  std::vector<Vecd> points;  // f(u), n + 2 coordinates
};

inline std::string export_csv_text(const ConstructResult& r, int m, int n) {
  std::ostringstream os;
  for (int i = 0; i < m; ++i) os << "u" << i << ',';
  for (int i = 0; i <= n; ++i) os << "x" << i << ',';
  os << "t\r\n";
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    bool first = true;
    for (double v : r.params[k]) {
      os << (first ? "" : ",") << decimal17(v);
      first = false;
    }
    for (double v : r.points[k]) os << ',' << decimal17(v);
    os << "\r\n";
  }
  return os.str();
}

inline ConstructResult cmd_construct(const RunConfig& c) {
  validate_config(c);
  const ParsedSpec spec = resolve_spec(c);
  if (spec.kind != "warped_product" || !spec.warped) {
    throw UsageError("construct needs a warped_product spec (--spec FILE)");
  }
  const WarpedConstruction& w = *spec.warped;
  const ParametricImmersion f = build_from_spec(spec);
  ConstructResult out;
  Report& rep = out.report;
  rep.command = "construct";
  std::vector<std::string> names{"sphere_constraint", "pullback", "psi"};
  for (const auto& s : detail::verify_tol_names()) names.push_back(s);
  rep.config = detail::config_echo(c, spec, names);
  rep.immersion = detail::immersion_echo(f);
  const auto samples = sample_chart(f.chart(), c.samples, c.seed);
  const int n = static_cast<int>(samples.size());
  const AmbientSpace& space = f.space();

  double constraint = 0.0;
  nlohmann::ordered_json t_norms = nlohmann::ordered_json::array();
  double t_max = 0.0;
  for (const auto& u : samples) {
    const Vecd p = f(u);
    constraint = std::max(constraint, validate_point(space, p));
    out.params.push_back(u);
    out.points.push_back(p);
    const double tn = norm(point_geometry(f, u).T);
    t_norms.push_back(tn);
    t_max = std::max(t_max, tn);
  }
  rep.checks.push_back(gated_check("sphere_constraint", constraint, c.tol("sphere_constraint"), n,
                                   "| <p_Q, p_Q> - eps |"));

  // Warped-product representation: pullback metric and psi(p0, q, ..., q) = p0.
  const auto& spec_w = w.spec;
  int rest = 0;
  for (int i = 1; i <= spec_w.k(); ++i) rest += spec_w.factor_dims()[i];
  Chart fac;
  for (int i = 0; i < spec_w.k(); ++i) {
    for (int j = 0; j < spec_w.factor_dims()[i + 1]; ++j) {
      fac.lower.push_back(-w.factors[i].half_width);
      fac.upper.push_back(w.factors[i].half_width);
    }
  }
  const auto ys = rest > 0 ? sample_chart(fac, c.samples, c.seed + 1) : std::vector<Vecd>(samples.size());
  double pull = 0.0, psi = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    Vecd x;
    if (w.profile.kind == ProfileSpec::Kind::curve) {
      for (const auto& cf : w.profile.coords) x.push_back(polynomial(cf, samples[k][0]));
    } else {
      for (const auto& cf : w.profile.coords) x.push_back(cf.empty() ? 0.0 : cf[0]);
    }
    Vecd full = x;
    full.insert(full.end(), ys[k].begin(), ys[k].end());
    pull = std::max(pull, pullback_vs_warped_metric(spec_w, full));
    const Vecd p0 = spec_w.first_factor_point(x);
    const std::vector<Vecd> qs(static_cast<std::size_t>(spec_w.k()), spec_w.q());
    psi = std::max(psi, max_abs(nolker_psi(spec_w, p0, qs) - p0));
  }
  rep.checks.push_back(gated_check("pullback_metric", pull, c.tol("pullback"), n,
                                   "max |psi^* g - (g_0 + sum sigma_i^2 g_i)|"));
  rep.checks.push_back(gated_check("psi_identity", psi, c.tol("psi"), n, "max |psi(p0, q, ..., q) - p0|"));
  rep.checks.push_back(info_check("t_norm", t_max, kTZeroTol, n, "max ||T|| over the samples"));
  rep.summaries["t_norms"] = t_norms;
  rep.summaries["sigma_at_q"] = nlohmann::ordered_json::array();
  for (int i = 1; i <= spec_w.k(); ++i) rep.summaries["sigma_at_q"].push_back(spec_w.sigma(i, spec_w.q()));

  nlohmann::ordered_json eq;
  for (auto& r : detail::equation_suite(f, samples, c, eq)) rep.checks.push_back(r);
  rep.summaries["equations"] = eq;
  return out;
}

}  // namespace prodgeo
