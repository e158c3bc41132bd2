#pragma once

// Named example immersions with closed-form invariants.
//
// Spheres are parametrized by gnomonic charts, so every entry is built from
// rational functions and square roots and its jets are exact. The seeded
// "generic" entries draw their coefficients from mt19937_64 and are the
// negative controls (non-flat normal bundle, not class A).

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "prodgeo/ambient.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/immersion.hpp"
#include "prodgeo/warped.hpp"

namespace prodgeo::catalog {

using Params = std::map<std::string, double>;

namespace detail {

inline double get(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

inline int get_int(const Params& p, const std::string& key, int fallback, int lo, int hi) {
  const double v = get(p, key, fallback);
  if (v != std::floor(v) || v < lo || v > hi) {
    throw ParamRangeError(key + " must be an integer in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

inline double get_open(const Params& p, const std::string& key, double fallback, double lo,
                       double hi) {
  const double v = get(p, key, fallback);
  if (!(v > lo && v < hi)) {
    throw ParamRangeError(key + " must lie in (" + std::to_string(lo) + ", " + std::to_string(hi) +
                          ")");
  }
  return v;
}

inline void check_keys(const Params& p, const std::vector<std::string>& allowed) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == k;
    if (!ok) throw ParamRangeError("unknown parameter '" + k + "'");
  }
}

inline Chart cube(int m, double w) {
  return Chart{Vecd(static_cast<std::size_t>(m), -w), Vecd(static_cast<std::size_t>(m), w)};
}

/// Seeded coefficients in [-1, 1]: (x >> 11) * 2^-53 mapped affinely.
inline std::vector<double> seeded_coefficients(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<double> c;
  for (int i = 0; i < count; ++i) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    c.push_back(2.0 * unit - 1.0);
  }
  return c;
}

template <class S>
Vec<S> concat(Vec<S> a, const Vec<S>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::uint64_t get_seed(const Params& p) {
  const double v = get(p, "seed", 7);
  if (v < 0 || v != std::floor(v) || v > 9.0e15) throw ParamRangeError("seed must be a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

/// S^m x {t0} in S^m x R (or H^m x {t0} for eps = -1).
inline ParametricImmersion slice_totally_geodesic(int m, int epsilon = 1, double t0 = 0.0) {
  const AmbientSpace space(epsilon, m);
  ExpectedAnalytics e;
  e.einstein_constant = (m - 1.0) * epsilon;
  e.num_principal = 1;
  e.dims = {m};
  e.xi_norms = {0.0};
  e.class_a = e.einstein = e.minimal = e.flat_normal = true;
  return make_immersion("slice_totally_geodesic", space, detail::cube(m, epsilon > 0 ? 0.5 : 0.4),
                        [epsilon, t0](const auto& x) {
                          using S = std::decay_t<decltype(x[0])>;
                          Vec<S> p = gnomonic_point(x, epsilon);
                          p.push_back(S(t0));
                          return p;
                        },
                        e);
}

/// S^m(r) in S^{m+1} x {t0}: umbilic with kappa = sqrt(1 - r^2) / r.
inline ParametricImmersion slice_small_sphere(int m, double r, double t0 = 0.0) {
  const AmbientSpace space(1, m + 1);
  const double kappa = std::sqrt(1.0 - r * r) / r;
  ExpectedAnalytics e;
  e.einstein_constant = (m - 1.0) / (r * r);
  e.num_principal = 1;
  e.dims = {m};
  e.xi_norms = {kappa};
  e.class_a = e.einstein = e.flat_normal = true;
  e.minimal = false;
  return make_immersion("slice_small_sphere", space, detail::cube(m, 0.5),
                        [r, t0](const auto& x) {
                          using S = std::decay_t<decltype(x[0])>;
                          Vec<S> p{S(std::sqrt(1.0 - r * r))};
                          p = detail::concat(p, scaled(gnomonic_point(x), r));
                          p.push_back(S(t0));
                          return p;
                        },
                        e);
}

/// S^{m-1}(r) x R in S^m x R.
inline ParametricImmersion vertical_cylinder(int m, double r) {
  const AmbientSpace space(1, m);
  const double kappa = std::sqrt(1.0 - r * r) / r;
  ExpectedAnalytics e;
  e.num_principal = 2;
  e.dims = {1, m - 1};
  e.xi_norms = {0.0, kappa};
  e.class_a = e.flat_normal = true;
  e.minimal = false;
  e.einstein = m == 2;
  if (m == 2) e.einstein_constant = 0.0;
  Chart chart = detail::cube(m, 0.5);
  return make_immersion("vertical_cylinder", space, chart,
                        [r, m](const auto& u) {
                          using S = std::decay_t<decltype(u[0])>;
                          const Vec<S> x(u.begin(), u.begin() + (m - 1));
                          Vec<S> p{S(std::sqrt(1.0 - r * r))};
                          p = detail::concat(p, scaled(gnomonic_point(x), r));
                          p.push_back(u[m - 1]);
                          return p;
                        },
                        e);
}

/// S^p(r) x S^q(sqrt(1 - r^2)) in S^{p+q+1} x {t0}.
inline ParametricImmersion clifford_product(int p, int q, double r, double t0 = 0.0) {
  const int m = p + q;
  const AmbientSpace space(1, m + 1);
  const double rr = std::sqrt(1.0 - r * r);
  const double k1 = rr / r;
  const double k2 = r / rr;
  ExpectedAnalytics e;
  e.flat_normal = e.class_a = true;
  const double l1 = (p - 1.0) / (r * r);
  const double l2 = (q - 1.0) / (rr * rr);
  e.einstein = std::abs(l1 - l2) < 1e-12;
  if (*e.einstein) e.einstein_constant = l1;
  e.minimal = std::abs(p * k1 - q * k2) < 1e-12;
  if (std::abs(k1 - k2) < 1e-12 && p == q) {
    e.num_principal = 2;
    e.dims = {p, q};
    e.xi_norms = {k1, k2};
  } else {
    e.num_principal = 2;
    // sorted by |xi|, then multiplicity
    if (k1 < k2 || (k1 == k2 && p <= q)) {
      e.dims = {p, q};
      e.xi_norms = {k1, k2};
    } else {
      e.dims = {q, p};
      e.xi_norms = {k2, k1};
    }
  }
  return make_immersion("clifford_product", space, detail::cube(m, 0.5),
                        [p, q, r, rr, t0](const auto& u) {
                          using S = std::decay_t<decltype(u[0])>;
                          const Vec<S> x(u.begin(), u.begin() + p);
                          const Vec<S> y(u.begin() + p, u.begin() + p + q);
                          Vec<S> pt = detail::concat(scaled(gnomonic_point(x), r),
                                                     scaled(gnomonic_point(y), rr));
                          pt.push_back(S(t0));
                          return pt;
                        },
                        e);
}

/// S^1(r) x S^1(sqrt(1 - r^2)) x R in S^3 x R: flat (Einstein with
/// lambda = 0), nowhere-vanishing T, flat normal bundle.
inline ParametricImmersion torus_cylinder(double r) {
  const AmbientSpace space(1, 3);
  const double rr = std::sqrt(1.0 - r * r);
  ExpectedAnalytics e;
  e.einstein_constant = 0.0;
  e.einstein = e.class_a = e.flat_normal = true;
  e.minimal = std::abs(r - rr) < 1e-12;
  const double k1 = rr / r;
  const double k2 = r / rr;
  e.num_principal = 3;
  e.dims = {1, 1, 1};
  e.xi_norms = {0.0, std::min(k1, k2), std::max(k1, k2)};
  return make_immersion("torus_cylinder", space, detail::cube(3, 0.5),
                        [r, rr](const auto& u) {
                          using S = std::decay_t<decltype(u[0])>;
                          const Vec<S> a{u[0]};
                          const Vec<S> b{u[1]};
                          Vec<S> p = detail::concat(scaled(gnomonic_point(a), r),
                                                    scaled(gnomonic_point(b), rr));
                          p.push_back(u[2]);
                          return p;
                        },
                        e);
}

/// Rotational hypersurface (cos s, sin s * sigma(y), h(s)) in S^m x R,
/// sigma a gnomonic chart of S^{m-1} and h a cubic.
inline ParametricImmersion rotational_graph(int m, std::vector<double> coeffs) {
  const AmbientSpace space(1, m);
  ExpectedAnalytics e;
  e.class_a = e.flat_normal = true;
  Chart chart = detail::cube(m, 0.5);
  chart.lower[0] = 0.6;
  chart.upper[0] = 1.3;
  return make_immersion("rotational_graph", space, chart,
                        [m, coeffs](const auto& u) {
                          using S = std::decay_t<decltype(u[0])>;
                          const S s = u[0];
                          const Vec<S> y(u.begin() + 1, u.begin() + m);
                          Vec<S> p{cos(s)};
                          p = detail::concat(p, scaled(gnomonic_point(y), sin(s)));
                          p.push_back(polynomial(coeffs, s));
                          return p;
                        },
                        e);
}

/// A surface in S^4 x R with seeded quadratic bending in two normal
/// directions and a seeded quadratic height: non-flat normal bundle.
inline ParametricImmersion generic_codim2_surface(std::uint64_t seed) {
  const AmbientSpace space(1, 4);
  // 2 x 6 quadratic coefficients for the bending, 6 for the height.
  const auto c = detail::seeded_coefficients(seed, 18);
  ExpectedAnalytics e;
  e.flat_normal = false;
  return make_immersion("generic_codim2_surface", space, detail::cube(2, 0.4),
                        [c](const auto& x) {
                          using S = std::decay_t<decltype(x[0])>;
                          auto quad = [&](int off) {
                            return c[off] * x[0] + c[off + 1] * x[1] + c[off + 2] * x[0] * x[0] +
                                   c[off + 3] * x[0] * x[1] + c[off + 4] * x[1] * x[1] +
                                   S(0.5 * c[off + 5]);
                          };
                          Vec<S> v{S(1.0), x[0], x[1], 0.8 * quad(0), 0.8 * quad(6)};
                          S n2(0.0);
                          for (const auto& a : v) n2 += a * a;
                          Vec<S> p = scaled(v, recip(sqrt(n2)));
                          p.push_back(0.5 * quad(12));
                          return p;
                        },
                        e);
}

/// Graph of a seeded harmonic quadratic over a gnomonic chart of S^3: flat
/// normal bundle (hypersurface) but not class A.
inline ParametricImmersion generic_graph_hypersurface(std::uint64_t seed) {
  const AmbientSpace space(1, 3);
  const auto c = detail::seeded_coefficients(seed, 8);
  ExpectedAnalytics e;
  e.flat_normal = true;
  e.class_a = false;
  return make_immersion("generic_graph_hypersurface", space, detail::cube(3, 0.5),
                        [c](const auto& x) {
                          using S = std::decay_t<decltype(x[0])>;
                          // linear part plus a traceless quadratic form (harmonic in R^3)
                          const S h = c[0] * x[0] + c[1] * x[1] + c[2] * x[2] +
                                      c[3] * x[0] * x[1] + c[4] * x[0] * x[2] +
                                      c[5] * x[1] * x[2] + c[6] * (x[0] * x[0] - x[1] * x[1]) +
                                      c[7] * (x[1] * x[1] - x[2] * x[2]);
                          Vec<S> p = gnomonic_point(x);
                          p.push_back(h);
                          return p;
                        },
                        e);
}

/// Default multi-rotational submanifold M^3 in S^4 x R: profile curve in a
/// totally geodesic S^2 with nonconstant height, two circle factors.
inline WarpedProductSpec default_multirotational_spec() {
  const Vecd q{1, 0, 0, 0, 0};
  const std::vector<Vecd> z{{0, 1, 0, 0, 0}, {0, -1, 1, 0, 0}};
  return WarpedProductSpec(1, 4, q, z, {2, 1, 1});
}

inline ProfileSpec default_multirotational_profile(double height_slope = 0.6) {
  ProfileSpec p;
  p.kind = ProfileSpec::Kind::curve;
  p.coords = {{0.05, 0.3, 0.1}, {-0.1, 0.2, 0.0, 0.1}};
  p.height = {0.0, height_slope, 0.25};
  p.s_lower = -0.5;
  p.s_upper = 0.5;
  return p;
}

inline ParametricImmersion multirotational(double height_slope = 0.6) {
  ExpectedAnalytics e;
  e.flat_normal = true;
  e.class_a = true;
  return build_multirotational(default_multirotational_spec(),
                               default_multirotational_profile(height_slope), 0.4)
      .with_expected(e);
}

struct EntryInfo {
  std::string name;
  std::vector<std::string> params;
  std::string description;
};

inline const std::vector<EntryInfo>& registry() {
  static const std::vector<EntryInfo> r{
      {"slice_totally_geodesic", {"m", "epsilon", "t0"}, "Q^m x {t0} in Q^m x R"},
      {"slice_small_sphere", {"m", "r", "t0"}, "S^m(r) in S^{m+1} x {t0}"},
      {"vertical_cylinder", {"m", "r"}, "S^{m-1}(r) x R in S^m x R"},
      {"clifford_product", {"p", "q", "r", "t0"}, "S^p(r) x S^q(sqrt(1-r^2)) in S^{p+q+1} x {t0}"},
      {"torus_cylinder", {"r"}, "S^1(r) x S^1(sqrt(1-r^2)) x R in S^3 x R"},
      {"rotational_graph", {"m", "c0", "c1", "c2", "c3"}, "(cos s, sin s sigma(y), h(s)) in S^m x R"},
      {"generic_codim2_surface", {"seed"}, "seeded surface in S^4 x R (non-flat normal bundle)"},
      {"generic_graph_hypersurface", {"seed"}, "seeded harmonic graph over S^3 (not class A)"},
      {"multirotational", {"height_slope"}, "profile curve x S^1 x S^1 in S^4 x R"},
  };
  return r;
}

/// Builds a catalog entry. Unknown names raise UnknownEntryError; bad or
/// unknown parameters raise ParamRangeError.
inline ParametricImmersion make(const std::string& name, const Params& params = {}) {
  const EntryInfo* info = nullptr;
  for (const auto& e : registry())
    if (e.name == name) info = &e;
  if (info == nullptr) throw UnknownEntryError("unknown catalog entry '" + name + "'");
  detail::check_keys(params, info->params);
  using namespace detail;
  const double half = std::sqrt(0.5);
  if (name == "slice_totally_geodesic") {
    const int eps = get_int(params, "epsilon", 1, -1, 1);
    if (eps == 0) throw ParamRangeError("epsilon must be +1 or -1");
    return slice_totally_geodesic(get_int(params, "m", 3, 2, 8), eps, get(params, "t0", 0.0));
  }
  if (name == "slice_small_sphere") {
    return slice_small_sphere(get_int(params, "m", 4, 2, 8), get_open(params, "r", half, 0.0, 1.0),
                              get(params, "t0", 0.0));
  }
  if (name == "vertical_cylinder") {
    return vertical_cylinder(get_int(params, "m", 3, 2, 8), get_open(params, "r", half, 0.0, 1.0));
  }
  if (name == "clifford_product") {
    const int p = get_int(params, "p", 2, 1, 7);
    const int q = get_int(params, "q", 2, 1, 7);
    if (p + q > 8) throw ParamRangeError("p + q must be at most 8");
    return clifford_product(p, q, get_open(params, "r", half, 0.0, 1.0), get(params, "t0", 0.0));
  }
  if (name == "torus_cylinder") return torus_cylinder(get_open(params, "r", half, 0.0, 1.0));
  if (name == "rotational_graph") {
    return rotational_graph(get_int(params, "m", 3, 2, 8),
                            {get(params, "c0", 0.0), get(params, "c1", 0.7), get(params, "c2", 0.3),
                             get(params, "c3", -0.2)});
  }
  if (name == "generic_codim2_surface") return generic_codim2_surface(get_seed(params));
  if (name == "generic_graph_hypersurface") return generic_graph_hypersurface(get_seed(params));
  return multirotational(get(params, "height_slope", 0.6));
}

/// Default instance of every entry (the test corpus).
inline std::vector<ParametricImmersion> all_defaults() {
  std::vector<ParametricImmersion> r;
  for (const auto& e : registry()) r.push_back(make(e.name));
  return r;
}

}  // namespace prodgeo::catalog
