#pragma once

// Q^n_eps x R inside the flat container E^{n+2}.
//
// Coordinates are (x_0, ..., x_n, t). For eps = +1 the container is
// Euclidean and Q is the unit sphere; for eps = -1 the first coordinate is
// timelike and Q is the upper sheet of the hyperboloid <x, x> = -1.

#include <cmath>
#include <string>

#include "prodgeo/errors.hpp"
#include "prodgeo/jet.hpp"
#include "prodgeo/linalg.hpp"

namespace prodgeo {

inline constexpr double kTangencyTol = 1e-9;

using AmbientPoint = Vecd;

class AmbientSpace {
 public:
  AmbientSpace() = default;
  AmbientSpace(int epsilon, int n) : epsilon_(epsilon), n_(n) {
    if (epsilon != 1 && epsilon != -1) {
      throw SpecMismatchError("ambient epsilon must be +1 or -1");
    }
    if (n < 2 || n > 12) throw SpecMismatchError("ambient n must lie in [2, 12]");
  }

  int epsilon() const { return epsilon_; }
  int n() const { return n_; }
  int dim() const { return n_ + 2; }
  int time_index() const { return n_ + 1; }

  /// Flat inner product of the container (Lorentzian when eps = -1).
  template <class S>
  S inner(const Vec<S>& a, const Vec<S>& b) const {
    S r(0.0);
    for (int k = 0; k < dim(); ++k) {
      if (k == 0 && epsilon_ < 0) {
        r -= a[0] * b[0];
      } else {
        r += a[k] * b[k];
      }
    }
    return r;
  }

  template <class S>
  S norm2(const Vec<S>& a) const {
    return inner(a, a);
  }

  /// Unit normal N of Q x R at p: the space-form part of p, with zero height.
  template <class S>
  Vec<S> inclusion_normal(const Vec<S>& p) const {
    Vec<S> r = p;
    r[time_index()] = S(0.0);
    return r;
  }

  /// Orthogonal projection of V onto T_p(Q x R). <N, N> = eps.
  template <class S>
  Vec<S> project_to_product(const Vec<S>& p, const Vec<S>& v) const {
    const Vec<S> nb = inclusion_normal(p);
    const S c = inner(v, nb) * static_cast<double>(epsilon_);
    Vec<S> r = v;
    for (int k = 0; k < dim(); ++k) r[k] -= c * nb[k];
    return r;
  }

  /// The unit vertical field d/dt (parallel on Q x R).
  Vecd vertical() const {
    Vecd e(static_cast<std::size_t>(dim()), 0.0);
    e[time_index()] = 1.0;
    return e;
  }

  /// Space-form part <p_Q, p_Q>.
  double space_form_norm2(const Vecd& p) const {
    Vecd q = inclusion_normal(p);
    return inner(q, q);
  }

 private:
  int epsilon_ = 1;
  int n_ = 2;
};

/// |<p_Q, p_Q> - eps|; zero for points on Q x R.
inline double validate_point(const AmbientSpace& space, const AmbientPoint& p) {
  if (static_cast<int>(p.size()) != space.dim()) {
    throw GeometryError("validate_point: point has " + std::to_string(p.size()) +
                        " coordinates, expected " + std::to_string(space.dim()));
  }
  return std::abs(space.space_form_norm2(p) - space.epsilon());
}

/// Full membership test, including the upper sheet for eps = -1.
inline bool on_product(const AmbientSpace& space, const AmbientPoint& p, double tol) {
  if (validate_point(space, p) > tol) return false;
  return space.epsilon() > 0 || p[0] > 0.0;
}

/// Shape operator of the inclusion Q x R -> E^{n+2} along its unit normal:
/// A Z = -Z + <Z, dt> dt.
inline Vecd inclusion_shape(const AmbientSpace& space, const AmbientPoint& p, const Vecd& z) {
  const Vecd nb = space.inclusion_normal(p);
  if (std::abs(space.inner(z, nb)) > kTangencyTol * std::max(1.0, norm(z))) {
    throw GeometryError("inclusion_shape: vector is not tangent to Q x R");
  }
  Vecd r = scaled(z, -1.0);
  r[space.time_index()] += z[space.time_index()];
  return r;
}

/// Levi-Civita derivative of Q x R: nabla_X W = (D_X W)^T where D is the
/// flat derivative and (.)^T removes the N component.
/// `w` is a jet-valued field over the chart and `p` the jet of the locus;
/// `x` holds the coordinate components of the direction.
inline Vecd product_connection(const AmbientSpace& space, const Vec<Jet>& p,
                               const Vec<Jet>& w, const Vecd& x) {
  const Vecd pv = values(p);
  const Vecd wv = values(w);
  const Vecd nb = space.inclusion_normal(pv);
  if (std::abs(space.inner(wv, nb)) > kTangencyTol * std::max(1.0, norm(wv))) {
    throw GeometryError("product_connection: field is not tangent to Q x R");
  }
  return space.project_to_product(pv, directional(w, x));
}

}  // namespace prodgeo
