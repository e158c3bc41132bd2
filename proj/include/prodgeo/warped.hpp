#pragma once

// Noelker warped product representations of Q^n_eps and the extrinsic
// warped products (in particular multi-rotational submanifolds) of
// Q^n_eps x R built from them.
//
// Q^n_eps sits in E^{n+1}. A spec fixes q in Q, the mean curvature vectors
// z_1..z_k at q of the warped factors, and an orthogonal split
// T_qQ = V_0 + V_1 + ... + V_k with every z_i in V_0. Then
//   N_0 = Q meets span{q, V_0}                  (totally geodesic)
//   N_i = sphere through q tangent to V_i with mean curvature z_i
//   sigma_i(p) = <p, a_i>,  a_i = c q - z_i,  c = eps
//   psi(p_0, ..., p_k) = p_0 + sum_i sigma_i(p_0) (p_i - q).
// The height coordinate of Q x R rides with the profile f_0.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "prodgeo/ambient.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/immersion.hpp"
#include "prodgeo/jet.hpp"
#include "prodgeo/linalg.hpp"

namespace prodgeo {

inline constexpr double kWarpedConstraintTol = 1e-10;
inline constexpr double kPullbackTol = 1e-9;

class WarpedProductSpec {
 public:
  /// `q` and `z` live in E^{n+1} (the space-form container).
  /// `c` overrides the constant in a_i = c q - z_i (default eps).
  WarpedProductSpec(int epsilon, int n, Vecd q, std::vector<Vecd> z, std::vector<int> factor_dims,
                    std::optional<double> c = std::nullopt)
      : epsilon_(epsilon), n_(n), q_(std::move(q)), z_(std::move(z)), dims_(std::move(factor_dims)) {
    if (epsilon != 1 && epsilon != -1) throw SpecMismatchError("warped spec: epsilon must be +-1");
    if (n < 2 || n > 12) throw SpecMismatchError("warped spec: n must lie in [2, 12]");
    const int k = static_cast<int>(z_.size());
    if (k < 1) throw SpecMismatchError("warped spec: need at least one warped factor");
    if (static_cast<int>(dims_.size()) != k + 1) {
      throw SpecMismatchError("warped spec: factor_dims must list n_0..n_k");
    }
    int total = 0;
    for (int d : dims_) {
      if (d < 1) throw SpecMismatchError("warped spec: factor dimensions must be >= 1");
      total += d;
    }
    if (total != n) throw SpecMismatchError("warped spec: factor dimensions must sum to n");
    if (static_cast<int>(q_.size()) != n + 1) throw SpecMismatchError("warped spec: q must have n+1 coordinates");
    for (const auto& v : z_)
      if (static_cast<int>(v.size()) != n + 1) throw SpecMismatchError("warped spec: z_i must have n+1 coordinates");
    if (std::abs(inner(q_, q_) - epsilon_) > kWarpedConstraintTol || (epsilon_ < 0 && q_[0] <= 0)) {
      throw SpecMismatchError("warped spec: q is not on Q^n_eps");
    }
    for (int i = 0; i < k; ++i) {
      if (std::abs(inner(z_[i], q_)) > kWarpedConstraintTol) {
        throw SpecMismatchError("warped spec: z_" + std::to_string(i + 1) + " is not tangent at q");
      }
      for (int j = i + 1; j < k; ++j) {
        const double v = inner(z_[i], z_[j]);
        if (std::abs(v + epsilon_) > kWarpedConstraintTol) {
          throw SpecMismatchError("warped spec: <z_" + std::to_string(i + 1) + ", z_" +
                                  std::to_string(j + 1) + "> = " + std::to_string(v) +
                                  " violates <z_i, z_j> = -eps");
        }
      }
    }
    c_ = c.value_or(static_cast<double>(epsilon_));
    for (int i = 0; i < k; ++i) {
      Vecd a = scaled(q_, c_) - z_[i];
      a_.push_back(a);
      Vecd h = scaled(a, -1.0);
      const double hh = inner(h, h);
      if (!(hh > 1e-12)) {
        throw SpecMismatchError("warped spec: factor " + std::to_string(i + 1) +
                                " is not a round sphere (<h, h> <= 0); only spherical factors are supported");
      }
      h_.push_back(h);
    }
    build_bases();
  }

  int epsilon() const { return epsilon_; }
  int n() const { return n_; }
  int k() const { return static_cast<int>(z_.size()); }
  double c() const { return c_; }
  const Vecd& q() const { return q_; }
  const std::vector<Vecd>& z() const { return z_; }
  const std::vector<Vecd>& a() const { return a_; }
  const std::vector<int>& factor_dims() const { return dims_; }
  /// Orthonormal basis of V_i.
  const std::vector<Vecd>& basis(int i) const { return bases_[i]; }

  /// Inner product of the container E^{n+1}.
  template <class S>
  S inner(const Vec<S>& x, const Vec<S>& y) const {
    S r(0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k == 0 && epsilon_ < 0) {
        r -= x[0] * y[0];
      } else {
        r += x[k] * y[k];
      }
    }
    return r;
  }

  /// Sphere N_i (i >= 1): center and radius.
  Vecd sphere_center(int i) const {
    const Vecd& h = h_[i - 1];
    return q_ + scaled(h, 1.0 / inner(h, h));
  }
  double sphere_radius(int i) const { return 1.0 / std::sqrt(inner(h_[i - 1], h_[i - 1])); }
  /// Unit vector from the center of N_i towards q.
  Vecd sphere_pole(int i) const {
    const Vecd& h = h_[i - 1];
    return scaled(h, -1.0 / std::sqrt(inner(h, h)));
  }

  /// Chart of N_0: x in R^{n_0} -> (q + sum x_j w_j) / sqrt(1 + eps |x|^2).
  template <class S>
  Vec<S> first_factor_point(const Vec<S>& x) const {
    S r2(1.0);
    for (const auto& v : x) r2 += static_cast<double>(epsilon_) * v * v;
    const S inv = recip(checked_sqrt(r2));
    Vec<S> p;
    for (double v : q_) p.push_back(S(v));
    for (int j = 0; j < dims_[0]; ++j) axpy(p, x[j], as<S>(bases_[0][j]));
    return scaled(p, inv);
  }

  /// Gnomonic chart of N_i centred at q: y in R^{n_i}.
  template <class S>
  Vec<S> factor_point(int i, const Vec<S>& y) const {
    S r2(1.0);
    for (const auto& v : y) r2 += v * v;
    const S inv = recip(sqrt(r2));
    Vec<S> dir = as<S>(sphere_pole(i));
    for (int j = 0; j < dims_[i]; ++j) axpy(dir, y[j], as<S>(bases_[i][j]));
    Vec<S> p = as<S>(sphere_center(i));
    axpy(p, inv * sphere_radius(i), dir);
    return p;
  }

  /// Small sphere of relative radius r inside N_i (dimension n_i - 1).
  template <class S>
  Vec<S> factor_small_sphere_point(int i, double r, const Vec<S>& y) const {
    const Vec<S> g = gnomonic_point(y);
    Vec<S> dir = as<S>(scaled(sphere_pole(i), std::sqrt(1.0 - r * r)));
    for (int j = 0; j < dims_[i]; ++j) axpy(dir, g[j] * r, as<S>(bases_[i][j]));
    Vec<S> p = as<S>(sphere_center(i));
    axpy(p, S(sphere_radius(i)), dir);
    return p;
  }

  template <class S>
  S sigma(int i, const Vec<S>& p0) const {
    return inner(p0, as<S>(a_[i - 1]));
  }

  /// psi(p_0, ..., p_k); throws DomainError where some sigma_i <= 0.
  template <class S>
  Vec<S> psi(const Vec<S>& p0, const std::vector<Vec<S>>& ps) const {
    Vec<S> r = p0;
    for (int i = 1; i <= k(); ++i) {
      const S s = sigma(i, p0);
      if (!(value_of(s) > 0.0)) {
        throw DomainError("psi: sigma_" + std::to_string(i) + " <= 0 (outside the dense image)");
      }
      axpy(r, s, ps[i - 1] - as<S>(q_));
    }
    return r;
  }

 private:
  template <class S>
  static Vec<S> as(const Vecd& v) {
    return Vec<S>(v.begin(), v.end());
  }

  void build_bases() {
    const int dim = n_ + 1;
    std::vector<Vecd> cand = z_;
    for (int j = 0; j < dim; ++j) {
      Vecd e(static_cast<std::size_t>(dim), 0.0);
      e[j] = 1.0;
      cand.push_back(e);
    }
    std::vector<Vecd> ortho;
    int z_rank = 0;
    for (std::size_t idx = 0; idx < cand.size() && static_cast<int>(ortho.size()) < n_; ++idx) {
      Vecd v = cand[idx];
      axpy(v, -inner(v, q_) / inner(q_, q_), q_);
      for (const auto& w : ortho) axpy(v, -inner(v, w), w);
      for (const auto& w : ortho) axpy(v, -inner(v, w), w);
      const double nn = inner(v, v);
      if (nn < 1e-16) continue;
      ortho.push_back(scaled(v, 1.0 / std::sqrt(nn)));
      if (idx < z_.size()) ++z_rank;
    }
    if (z_rank > dims_[0]) {
      throw SpecMismatchError("warped spec: span of z_i exceeds the first factor dimension");
    }
    int pos = 0;
    for (int d : dims_) {
      bases_.emplace_back(ortho.begin() + pos, ortho.begin() + pos + d);
      pos += d;
    }
  }

  int epsilon_;
  int n_;
  Vecd q_;
  std::vector<Vecd> z_;
  std::vector<int> dims_;
  double c_ = 1.0;
  std::vector<Vecd> a_;
  std::vector<Vecd> h_;
  std::vector<std::vector<Vecd>> bases_;
};

/// sigma_i(p0) for p0 on N_0.
inline double sigma_eval(const WarpedProductSpec& spec, const Vecd& p0, int i) {
  if (i < 1 || i > spec.k()) throw DomainError("sigma_eval: factor index out of range");
  if (std::abs(spec.inner(p0, p0) - spec.epsilon()) > 1e-9) {
    throw DomainError("sigma_eval: p0 is not on Q^n_eps");
  }
  // p0 must lie in span{q, V_0}
  Vecd rest = p0;
  axpy(rest, -spec.inner(p0, spec.q()) / spec.inner(spec.q(), spec.q()), spec.q());
  for (const auto& w : spec.basis(0)) axpy(rest, -spec.inner(rest, w), w);
  if (max_abs(rest) > 1e-9) throw DomainError("sigma_eval: p0 is not on the first factor");
  return spec.sigma(i, p0);
}

inline Vecd nolker_psi(const WarpedProductSpec& spec, const Vecd& p0,
                       const std::vector<Vecd>& ps) {
  if (static_cast<int>(ps.size()) != spec.k()) {
    throw SpecMismatchError("nolker_psi: expected one point per warped factor");
  }
  return spec.psi(p0, ps);
}

/// Pullback of the container metric under a chart (order-1 jets).
inline Matd pullback_metric(const Vec<Jet>& y, int m, const std::function<double(int, int)>& g) {
  Matd r(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (std::size_t c = 0; c < y.size(); ++c)
        for (std::size_t d = 0; d < y.size(); ++d) {
          const double w = g(static_cast<int>(c), static_cast<int>(d));
          if (w != 0.0) s += w * y[c].d(a) * y[d].d(b);
        }
      r(a, b) = s;
    }
  return r;
}

/// Max entry difference between the pullback of the Q metric under
/// psi o (chart_0 x ... x chart_k) and the warped metric
/// g_0 + sum sigma_i(p_0)^2 g_i built from the factor charts separately.
/// `sample` concatenates x in R^{n_0} and y_i in R^{n_i}.
inline double pullback_vs_warped_metric(const WarpedProductSpec& spec, const Vecd& sample) {
  const int n = spec.n();
  if (static_cast<int>(sample.size()) != n) throw SpecMismatchError("pullback: sample must have n coordinates");
  const auto& dims = spec.factor_dims();
  auto g = [&](int c, int d) -> double {
    if (c != d) return 0.0;
    return (c == 0 && spec.epsilon() < 0) ? -1.0 : 1.0;
  };
  // Full map.
  const Vec<Jet> u = seed_variables(sample, 1);
  std::vector<Vec<Jet>> parts;
  int pos = 0;
  for (int d : dims) {
    parts.emplace_back(u.begin() + pos, u.begin() + pos + d);
    pos += d;
  }
  const Vec<Jet> p0 = spec.first_factor_point(parts[0]);
  std::vector<Vec<Jet>> ps;
  for (int i = 1; i <= spec.k(); ++i) ps.push_back(spec.factor_point(i, parts[i]));
  const Matd full = pullback_metric(spec.psi(p0, ps), n, g);

  // Block metric from each factor alone.
  Matd warped(n, n);
  pos = 0;
  for (int i = 0; i <= spec.k(); ++i) {
    const int d = dims[i];
    const Vecd sub(sample.begin() + pos, sample.begin() + pos + d);
    const Vec<Jet> v = seed_variables(sub, 1);
    const Matd gi = i == 0 ? pullback_metric(spec.first_factor_point(v), d, g)
                           : pullback_metric(spec.factor_point(i, v), d, g);
    double w = 1.0;
    if (i > 0) {
      const Vecd x0(sample.begin(), sample.begin() + dims[0]);
      const double s = spec.sigma(i, spec.first_factor_point(x0));
      w = s * s;
    }
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) warped(pos + a, pos + b) = w * gi(a, b);
    pos += d;
  }
  return max_abs(full - warped);
}

/// Profile f_0 into N_0 x R: a point, or a curve s -> (x(s), h(s)) with
/// polynomial gnomonic coordinates x_j(s) and polynomial height h(s).
struct ProfileSpec {
  enum class Kind { point, curve } kind = Kind::point;
  std::vector<std::vector<double>> coords;  // per x_j: coefficients (constant first)
  std::vector<double> height;               // coefficients of h
  double s_lower = -0.5;
  double s_upper = 0.5;

  int dim() const { return kind == Kind::point ? 0 : 1; }
};

struct FactorSpec {
  enum class Kind { identity, small_sphere } kind = Kind::identity;
  double radius = 1.0;      // relative radius for small_sphere, in (0, 1)
  double half_width = 0.5;  // chart half-width
};

template <class S>
S polynomial(const std::vector<double>& c, const S& s) {
  S r(0.0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * s + *it;
  return r;
}

/// f = psi o (f_0 x f_1 x ... x f_k) into Q^n_eps x R.
inline ParametricImmersion build_extrinsic_warped_product(const WarpedProductSpec& spec,
                                                          const ProfileSpec& profile,
                                                          const std::vector<FactorSpec>& factors,
                                                          std::string name = "extrinsic_warped_product") {
  const int k = spec.k();
  if (static_cast<int>(factors.size()) != k) {
    throw SpecMismatchError("extrinsic warped product: expected one factor per warped factor");
  }
  const int n0 = spec.factor_dims()[0];
  if (static_cast<int>(profile.coords.size()) != n0) {
    throw SpecMismatchError("extrinsic warped product: profile needs n_0 = " + std::to_string(n0) +
                            " coordinates");
  }
  Chart chart;
  if (profile.kind == ProfileSpec::Kind::curve) {
    if (!(profile.s_lower < profile.s_upper)) throw SpecMismatchError("profile: empty parameter interval");
    chart.lower.push_back(profile.s_lower);
    chart.upper.push_back(profile.s_upper);
  }
  std::vector<int> fdims;
  for (int i = 0; i < k; ++i) {
    const auto& fs = factors[i];
    int d = spec.factor_dims()[i + 1];
    if (fs.kind == FactorSpec::Kind::small_sphere) {
      if (d < 2) throw SpecMismatchError("small_sphere factor needs n_i >= 2");
      if (!(fs.radius > 0.0 && fs.radius < 1.0)) throw SpecMismatchError("small_sphere radius must lie in (0, 1)");
      d -= 1;
    }
    if (!(fs.half_width > 0.0)) throw SpecMismatchError("factor half-width must be positive");
    fdims.push_back(d);
    for (int j = 0; j < d; ++j) {
      chart.lower.push_back(-fs.half_width);
      chart.upper.push_back(fs.half_width);
    }
  }
  const AmbientSpace space(spec.epsilon(), spec.n());
  auto eval = [spec, profile, factors, fdims](const auto& u) {
    using S = std::decay_t<decltype(u[0])>;
    Vec<S> x;
    S t(0.0);
    int pos = 0;
    if (profile.kind == ProfileSpec::Kind::curve) {
      const S s = u[0];
      for (const auto& c : profile.coords) x.push_back(polynomial(c, s));
      t = polynomial(profile.height, s);
      pos = 1;
    } else {
      for (const auto& c : profile.coords) x.push_back(S(c.empty() ? 0.0 : c[0]));
      t = S(profile.height.empty() ? 0.0 : profile.height[0]);
    }
    const Vec<S> p0 = spec.first_factor_point(x);
    std::vector<Vec<S>> ps;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      Vec<S> y(u.begin() + pos, u.begin() + pos + fdims[i]);
      pos += fdims[i];
      const int idx = static_cast<int>(i) + 1;
      ps.push_back(factors[i].kind == FactorSpec::Kind::identity
                       ? spec.factor_point(idx, y)
                       : spec.factor_small_sphere_point(idx, factors[i].radius, y));
    }
    Vec<S> p = spec.psi(p0, ps);
    p.push_back(t);
    return p;
  };
  if (chart.dim() < 1) throw SpecMismatchError("extrinsic warped product has dimension 0");
  return make_immersion(std::move(name), space, chart, eval);
}

/// Multi-rotational submanifold: all warped factors are identities.
inline ParametricImmersion build_multirotational(const WarpedProductSpec& spec,
                                                 const ProfileSpec& profile,
                                                 double half_width = 0.5) {
  std::vector<FactorSpec> factors(static_cast<std::size_t>(spec.k()));
  for (auto& f : factors) f.half_width = half_width;
  return build_extrinsic_warped_product(spec, profile, factors, "multirotational");
}

}  // namespace prodgeo
