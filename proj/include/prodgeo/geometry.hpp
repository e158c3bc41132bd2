#pragma once

// First- and second-order extrinsic invariants of an immersion
// f: M^m -> Q^n_eps x R, plus intrinsic curvature from the induced metric.
//
// Everything is computed in the flat container E^{n+2}. Frames come from a
// Gram-Schmidt pipeline written over a generic scalar: run on doubles it
// gives the pointwise geometry, run on jets it gives exact derivatives of
// frames, of the second fundamental form and of any field assembled from
// them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prodgeo/ambient.hpp"
#include "prodgeo/derivatives.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/immersion.hpp"
#include "prodgeo/jet.hpp"
#include "prodgeo/linalg.hpp"

namespace prodgeo {

inline constexpr double kRankTolRelative = 1e-8;

// ---------------------------------------------------------------------------
// Frame pipeline (generic scalar)
// ---------------------------------------------------------------------------

template <class S>
struct Frames {
  std::vector<Vec<S>> tangent;  // orthonormal X_a
  Mat<S> basis;                 // X_a = sum_k basis(k, a) d_k f
  std::vector<Vec<S>> normal;   // orthonormal, inside T(Q x R), normal to f
};

/// Orthonormal tangent and normal frames at p from the coordinate tangents.
/// Tangents are orthonormalized in coordinate order (modified Gram-Schmidt).
/// Normals come from the coordinate axes projected onto T(Q x R) and
/// orthogonalized with column pivoting; `pivots` records the chosen axes and
/// is reused as-is when non-empty, so that a jet run reproduces the gauge
/// chosen by the double run.
template <class S>
Frames<S> build_frames(const AmbientSpace& space, const Vec<S>& p,
                       const std::vector<Vec<S>>& coord_tangent, std::vector<int>& pivots) {
  const int m = static_cast<int>(coord_tangent.size());
  const int dim = space.dim();
  const int rank = space.n() + 1 - m;
  Frames<S> fr;
  fr.basis = Mat<S>(m, m);
  std::vector<Vec<S>> coeffs;
  for (int a = 0; a < m; ++a) {
    Vec<S> v = coord_tangent[a];
    Vec<S> c = zeros<S>(m);
    c[a] = S(1.0);
    for (int b = 0; b < a; ++b) {
      const S r = space.inner(v, fr.tangent[b]);
      for (int k = 0; k < dim; ++k) v[k] -= r * fr.tangent[b][k];
      for (int k = 0; k < m; ++k) c[k] -= r * coeffs[b][k];
    }
    const S nrm2 = space.inner(v, v);
    if (!(value_of(nrm2) > 0.0)) throw RankError("build_frames: degenerate tangent");
    const S inv = recip(sqrt(nrm2));
    fr.tangent.push_back(scaled(v, inv));
    coeffs.push_back(scaled(c, inv));
  }
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < m; ++k) fr.basis(k, a) = coeffs[a][k];

  if (rank <= 0) return fr;
  std::vector<Vec<S>> cand;
  for (int j = 0; j < dim; ++j) {
    Vec<S> e = zeros<S>(dim);
    e[j] = S(1.0);
    Vec<S> w = space.project_to_product(p, e);
    for (int a = 0; a < m; ++a) {
      const S r = space.inner(w, fr.tangent[a]);
      for (int k = 0; k < dim; ++k) w[k] -= r * fr.tangent[a][k];
    }
    cand.push_back(std::move(w));
  }
  const bool reuse = static_cast<int>(pivots.size()) == rank;
  if (!reuse) pivots.clear();
  std::vector<bool> used(static_cast<std::size_t>(dim), false);
  for (int step = 0; step < rank; ++step) {
    int pick = -1;
    if (reuse) {
      pick = pivots[step];
    } else {
      double best = 0.0;
      for (int j = 0; j < dim; ++j) {
        if (used[j]) continue;
        const double v = value_of(space.inner(cand[j], cand[j]));
        if (v > best * (1.0 + 1e-12)) {
          best = v;
          pick = j;
        }
      }
      if (pick < 0 || best < 1e-20) throw GeometryError("build_frames: normal space collapsed");
      pivots.push_back(pick);
    }
    used[pick] = true;
    const S inv = recip(sqrt(space.inner(cand[pick], cand[pick])));
    Vec<S> nu = scaled(cand[pick], inv);
    for (int j = 0; j < dim; ++j) {
      if (used[j]) continue;
      const S r = space.inner(cand[j], nu);
      for (int k = 0; k < dim; ++k) cand[j][k] -= r * nu[k];
    }
    fr.normal.push_back(std::move(nu));
  }
  return fr;
}

inline Frames<Jet> truncated(const Frames<Jet>& f, int order) {
  Frames<Jet> r;
  for (const auto& v : f.tangent) r.tangent.push_back(truncated(v, order));
  r.basis = truncated(f.basis, order);
  for (const auto& v : f.normal) r.normal.push_back(truncated(v, order));
  return r;
}

// ---------------------------------------------------------------------------
// Pointwise geometry
// ---------------------------------------------------------------------------

/// All first/second-order invariants at one parameter point. Tangent
/// quantities are in orthonormal tangent-frame coordinates, normal ones in
/// normal-frame coordinates. The frames are a gauge: only norms,
/// eigenvalues and residuals are meaningful outside this struct.
struct PointGeometry {
  int epsilon = 1;
  int m = 0;
  int normal_rank = 0;
  Vecd u;
  AmbientPoint point;
  Matd metric;
  std::vector<Vecd> coord_tangent;
  std::vector<Vecd> tangent_frame;
  Matd basis;
  std::vector<Vecd> normal_frame;
  std::vector<Matd> alpha;  // alpha[b](a, c) = <alpha(X_a, X_c), nu_b>
  Vecd H;
  Vecd T;
  Vecd eta;
  std::vector<int> pivots;

  /// alpha(x, y) in normal-frame coordinates.
  Vecd alpha_of(const Vecd& x, const Vecd& y) const {
    Vecd r(static_cast<std::size_t>(normal_rank), 0.0);
    for (int b = 0; b < normal_rank; ++b) r[b] = dot(x, alpha[b] * y);
    return r;
  }

  /// Shape operator A_xi (xi in normal-frame coordinates).
  Matd shape(const Vecd& xi) const {
    Matd r(m, m);
    for (int b = 0; b < normal_rank; ++b) r = r + alpha[b] * xi[b];
    return r;
  }

  Vecd tangent_ambient(const Vecd& x) const {
    Vecd r(point.size(), 0.0);
    for (int a = 0; a < m; ++a) axpy(r, x[a], tangent_frame[a]);
    return r;
  }

  Vecd normal_ambient(const Vecd& xi) const {
    Vecd r(point.size(), 0.0);
    for (int b = 0; b < normal_rank; ++b) axpy(r, xi[b], normal_frame[b]);
    return r;
  }

  /// Coordinate components of a tangent vector given in frame coordinates.
  Vecd coord_direction(const Vecd& x) const { return basis * x; }

  double t_norm() const { return norm(T); }
  double eta_norm() const { return norm(eta); }
};

struct ShapeOperatorSet {
  std::vector<Matd> matrices;  // one per normal-frame vector

  Matd along(const Vecd& xi) const {
    Matd r(matrices.empty() ? 0 : matrices[0].rows(), matrices.empty() ? 0 : matrices[0].cols());
    for (std::size_t b = 0; b < matrices.size(); ++b) r = r + matrices[b] * xi[b];
    return r;
  }
};

namespace detail {

inline void check_regular(const AmbientSpace& space, const Vecd& p,
                          const std::vector<Vecd>& dF) {
  const double res = validate_point(space, p);
  if (res > kTangencyTol * std::max(1.0, norm(p))) {
    throw GeometryError("point is off Q x R (validate_point residual " + std::to_string(res) +
                        ")");
  }
  if (space.epsilon() < 0 && p[0] <= 0.0) {
    throw GeometryError("point lies on the lower sheet of the hyperboloid");
  }
  const int m = static_cast<int>(dF.size());
  const Vecd nb = space.inclusion_normal(p);
  Matd gram(m, m);
  for (int i = 0; i < m; ++i) {
    if (std::abs(space.inner(dF[i], nb)) > kTangencyTol * std::max(1.0, norm(dF[i]))) {
      throw GeometryError("coordinate tangent is not tangent to Q x R");
    }
    for (int j = 0; j < m; ++j) gram(i, j) = space.inner(dF[i], dF[j]);
  }
  const auto eig = symmetric_eigen(gram);
  const double lo = eig.values.front();
  const double hi = eig.values.back();
  if (!(hi > 0.0) || !(lo > 0.0) ||
      std::sqrt(lo) <= kRankTolRelative * std::sqrt(hi)) {
    throw RankError("Jacobian rank < m (smallest singular value " +
                    std::to_string(lo > 0 ? std::sqrt(lo) : 0.0) + ")");
  }
}

/// Assembles PointGeometry from f, df and d2f values.
inline PointGeometry assemble(const AmbientSpace& space, const Vecd& u, const Vecd& p,
                              const std::vector<Vecd>& dF,
                              const std::vector<std::vector<Vecd>>& d2F,
                              std::vector<int> pivots) {
  check_regular(space, p, dF);
  PointGeometry pg;
  pg.epsilon = space.epsilon();
  pg.m = static_cast<int>(dF.size());
  pg.normal_rank = space.n() + 1 - pg.m;
  if (pg.normal_rank < 0) throw SpecMismatchError("immersion dimension exceeds n + 1");
  pg.u = u;
  pg.point = p;
  pg.coord_tangent = dF;
  pg.metric = Matd(pg.m, pg.m);
  for (int i = 0; i < pg.m; ++i)
    for (int j = 0; j < pg.m; ++j) pg.metric(i, j) = space.inner(dF[i], dF[j]);
  Frames<double> fr = build_frames<double>(space, p, dF, pivots);
  pg.pivots = pivots;
  pg.tangent_frame = fr.tangent;
  pg.basis = fr.basis;
  pg.normal_frame = fr.normal;
  const int m = pg.m;
  pg.alpha.assign(static_cast<std::size_t>(pg.normal_rank), Matd(m, m));
  for (int b = 0; b < pg.normal_rank; ++b) {
    Matd coord(m, m);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) coord(k, l) = space.inner(d2F[k][l], fr.normal[b]);
    Matd a = fr.basis.transposed() * coord * fr.basis;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
    pg.alpha[b] = a;
  }
  pg.H.assign(static_cast<std::size_t>(pg.normal_rank), 0.0);
  for (int b = 0; b < pg.normal_rank; ++b) {
    for (int a = 0; a < m; ++a) pg.H[b] += pg.alpha[b](a, a);
    pg.H[b] /= m;
  }
  const Vecd dt = space.vertical();
  pg.T.resize(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) pg.T[a] = space.inner(dt, fr.tangent[a]);
  pg.eta.resize(static_cast<std::size_t>(pg.normal_rank));
  for (int b = 0; b < pg.normal_rank; ++b) pg.eta[b] = space.inner(dt, fr.normal[b]);
  return pg;
}

}  // namespace detail

/// Pointwise invariants of f at u (exact second derivatives via jets).
inline PointGeometry point_geometry(const ParametricImmersion& f, std::span<const double> u) {
  const int m = f.dim();
  const Vec<Jet> y = f.jets(u, 2);
  Vecd p = values(y);
  std::vector<Vecd> dF(static_cast<std::size_t>(m), Vecd(y.size()));
  std::vector<std::vector<Vecd>> d2F(static_cast<std::size_t>(m),
                                     std::vector<Vecd>(static_cast<std::size_t>(m), Vecd(y.size())));
  for (std::size_t c = 0; c < y.size(); ++c)
    for (int i = 0; i < m; ++i) {
      dF[i][c] = y[c].d(i);
      for (int j = 0; j < m; ++j) d2F[i][j][c] = y[c].d(i, j);
    }
  return detail::assemble(f.space(), Vecd(u.begin(), u.end()), p, dF, d2F, {});
}

inline ShapeOperatorSet shape_operators(const PointGeometry& pg) { return {pg.alpha}; }

struct VerticalSplit {
  Vecd T;    // tangent-frame coordinates
  Vecd eta;  // normal-frame coordinates
  double reassembly_residual = 0.0;  // |f_* T + eta - dt|
};

inline VerticalSplit vertical_split(const PointGeometry& pg) {
  VerticalSplit r{pg.T, pg.eta, 0.0};
  Vecd v = pg.tangent_ambient(pg.T) + pg.normal_ambient(pg.eta);
  v.back() -= 1.0;
  r.reassembly_residual = norm(v);
  return r;
}

/// III(X_a, X_c) = sum_e <alpha(X_a, X_e), alpha(X_c, X_e)>.
inline Matd third_fundamental_form(const PointGeometry& pg) {
  Matd r(pg.m, pg.m);
  for (const auto& a : pg.alpha) r = r + a * a;
  return r;
}

/// Ric(X, Y) = eps (m - 1 - |T|^2) <X, Y> + eps (2 - m) <X, T><Y, T>
///             + m <H, alpha(X, Y)> - III(X, Y), in frame coordinates.
inline Matd extrinsic_ricci(const PointGeometry& pg, int epsilon) {
  const int m = pg.m;
  const double eps = epsilon;
  const double t2 = dot(pg.T, pg.T);
  Matd ric = third_fundamental_form(pg) * -1.0;
  for (int b = 0; b < pg.normal_rank; ++b) ric = ric + pg.alpha[b] * (m * pg.H[b]);
  for (int i = 0; i < m; ++i) {
    ric(i, i) += eps * (m - 1 - t2);
    for (int j = 0; j < m; ++j) ric(i, j) += eps * (2 - m) * pg.T[i] * pg.T[j];
  }
  return ric;
}

inline Matd extrinsic_ricci(const PointGeometry& pg) { return extrinsic_ricci(pg, pg.epsilon); }

/// Ricci curvature Ric(X) for a unit X (frame coordinates), expanded term
/// by term rather than read off the Ricci matrix.
inline double ricci_curvature_expansion(const PointGeometry& pg, const Vecd& x) {
  const double eps = pg.epsilon;
  const double m = pg.m;
  const double t2 = dot(pg.T, pg.T);
  const double tx = dot(pg.T, x);
  const Matd iii = third_fundamental_form(pg);
  return eps - eps / (m - 1.0) * (t2 - tx * tx) - eps * tx * tx +
         m / (m - 1.0) * dot(pg.H, pg.alpha_of(x, x)) - dot(x, iii * x) / (m - 1.0);
}

// ---------------------------------------------------------------------------
// Local jet expansion
// ---------------------------------------------------------------------------

/// How derivatives of f are obtained: exactly by jets, or from the
/// finite-difference oracle (used to probe numerical stability).
struct Backend {
  enum class Kind { jets, finite_difference } kind = Kind::jets;
  double step = 1e-3;
};

class LocalGeometry;

/// A normal (or tangent) vector field near u, built from the local jets.
using JetField = std::function<Vec<Jet>(const LocalGeometry&)>;

/// Third-order expansion of f at u with frames, second fundamental form and
/// metric carried as jets. Derivatives of derived fields are read off the
/// jets exactly; nothing is differentiated numerically (unless the
/// finite-difference backend is selected).
class LocalGeometry {
 public:
  LocalGeometry(const ParametricImmersion& f, std::span<const double> u, Backend backend = {})
      : space_(f.space()), m_(f.dim()), u_(u.begin(), u.end()) {
    Vec<Jet> f3;
    if (backend.kind == Backend::Kind::jets) {
      f3 = f.jets(u, 3);
    } else {
      f3 = finite_difference_oracle(f.real_map(), u, 3, backend.step, &f.chart()).to_jets();
    }
    const int dim = space_.dim();
    if (static_cast<int>(f3.size()) != dim) throw SpecMismatchError("immersion size mismatch");
    point2_ = truncated(f3, 2);
    d1_.resize(static_cast<std::size_t>(m_));
    d2_.assign(static_cast<std::size_t>(m_), std::vector<Vec<Jet>>(static_cast<std::size_t>(m_)));
    for (int k = 0; k < m_; ++k) {
      d1_[k].reserve(static_cast<std::size_t>(dim));
      for (int c = 0; c < dim; ++c) d1_[k].push_back(f3[c].partial(k));
    }
    for (int k = 0; k < m_; ++k)
      for (int l = 0; l < m_; ++l) {
        d2_[k][l].reserve(static_cast<std::size_t>(dim));
        for (int c = 0; c < dim; ++c) d2_[k][l].push_back(d1_[k][c].partial(l));
      }

    // Pointwise geometry from the value parts.
    std::vector<Vecd> dF;
    std::vector<std::vector<Vecd>> d2F(static_cast<std::size_t>(m_));
    for (int k = 0; k < m_; ++k) {
      dF.push_back(values(d1_[k]));
      for (int l = 0; l < m_; ++l) d2F[k].push_back(values(d2_[k][l]));
    }
    pg_ = detail::assemble(space_, u_, values(f3), dF, d2F, {});

    std::vector<int> piv = pg_.pivots;
    frames2_ = build_frames<Jet>(space_, point2_, d1_, piv);
    frames1_ = truncated(frames2_, 1);
    point1_ = truncated(f3, 1);

    alpha1_.assign(static_cast<std::size_t>(m_), std::vector<Vec<Jet>>(static_cast<std::size_t>(m_)));
    for (int k = 0; k < m_; ++k)
      for (int l = 0; l < m_; ++l) alpha1_[k][l] = normal_part(d2_[k][l]);

    // Metric (order 2) and Christoffel symbols (order 1).
    Mat<Jet> g(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) g(i, j) = space_.inner(d1_[i], d1_[j]);
    metric2_ = g;
    const Mat<Jet> ginv = inverse(truncated(g, 1));
    std::vector<Mat<Jet>> dg;
    for (int k = 0; k < m_; ++k) {
      Mat<Jet> d(m_, m_);
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j) d(i, j) = g(i, j).partial(k);
      dg.push_back(d);
    }
    christoffel1_.assign(static_cast<std::size_t>(m_ * m_ * m_), Jet(0.0));
    for (int l = 0; l < m_; ++l)
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j) {
          Jet s(0.0);
          for (int p = 0; p < m_; ++p)
            s += ginv(l, p) * (dg[i](j, p) + dg[j](i, p) - dg[p](i, j));
          christoffel1_[(l * m_ + i) * m_ + j] = 0.5 * s;
        }
  }

  const AmbientSpace& space() const { return space_; }
  int dim() const { return m_; }
  int normal_rank() const { return pg_.normal_rank; }
  const Vecd& u() const { return u_; }
  const PointGeometry& point() const { return pg_; }

  /// f, d_k f and d_k d_l f as jets (orders 2, 2, 1).
  const Vec<Jet>& position() const { return point2_; }
  const Vec<Jet>& position1() const { return point1_; }
  const Vec<Jet>& coord_tangent(int k) const { return d1_[k]; }
  const Vec<Jet>& coord_hessian(int k, int l) const { return d2_[k][l]; }
  const Frames<Jet>& frames2() const { return frames2_; }
  const Frames<Jet>& frames1() const { return frames1_; }
  const Mat<Jet>& metric_jets() const { return metric2_; }

  /// Christoffel symbol Gamma^l_ij as an order-1 jet.
  const Jet& christoffel(int l, int i, int j) const {
    return christoffel1_[(l * m_ + i) * m_ + j];
  }

  /// Component of V normal to f inside T(Q x R) (order-1 frames).
  Vec<Jet> normal_part(const Vec<Jet>& v) const {
    Vec<Jet> r = zeros<Jet>(space_.dim());
    for (const auto& nu : frames1_.normal) axpy(r, space_.inner(v, nu), nu);
    return r;
  }

  Vec<Jet> tangential_part(const Vec<Jet>& v) const {
    Vec<Jet> r = zeros<Jet>(space_.dim());
    for (const auto& x : frames1_.tangent) axpy(r, space_.inner(v, x), x);
    return r;
  }

  Vecd normal_part(const Vecd& v) const {
    Vecd r(v.size(), 0.0);
    for (const auto& nu : pg_.normal_frame) axpy(r, space_.inner(v, nu), nu);
    return r;
  }

  Vecd tangential_part(const Vecd& v) const {
    Vecd r(v.size(), 0.0);
    for (const auto& x : pg_.tangent_frame) axpy(r, space_.inner(v, x), x);
    return r;
  }

  /// Frame coordinates of a tangent ambient vector.
  Vecd tangent_coords(const Vecd& v) const {
    Vecd r(static_cast<std::size_t>(m_));
    for (int a = 0; a < m_; ++a) r[a] = space_.inner(v, pg_.tangent_frame[a]);
    return r;
  }

  Vecd normal_coords(const Vecd& v) const {
    Vecd r(static_cast<std::size_t>(normal_rank()));
    for (int b = 0; b < normal_rank(); ++b) r[b] = space_.inner(v, pg_.normal_frame[b]);
    return r;
  }

  /// Ambient second fundamental form alpha(d_k, d_l) (order-1 jets).
  const Vec<Jet>& alpha_coord(int k, int l) const { return alpha1_[k][l]; }

  /// alpha(X_a, X_c) for the moving orthonormal frame, ambient, order 1.
  Vec<Jet> alpha_frame(int a, int c) const {
    Vec<Jet> r = zeros<Jet>(space_.dim());
    for (int k = 0; k < m_; ++k)
      for (int l = 0; l < m_; ++l)
        axpy(r, frames1_.basis(k, a) * frames1_.basis(l, c), alpha1_[k][l]);
    return r;
  }

  /// Shape operators of the moving normal frame in the moving tangent frame.
  const std::vector<Mat<Jet>>& shape_jets() const {
    if (!shape_jets_) {
      std::vector<Mat<Jet>> s(static_cast<std::size_t>(normal_rank()), Mat<Jet>(m_, m_));
      for (int a = 0; a < m_; ++a)
        for (int c = a; c < m_; ++c) {
          const Vec<Jet> al = alpha_frame(a, c);
          for (int b = 0; b < normal_rank(); ++b) {
            s[b](a, c) = space_.inner(al, frames1_.normal[b]);
            s[b](c, a) = s[b](a, c);
          }
        }
      shape_jets_ = std::make_shared<std::vector<Mat<Jet>>>(std::move(s));
    }
    return *shape_jets_;
  }

  /// f_* T and eta as order-1 ambient fields.
  Vec<Jet> t_field() const { return tangential_part(constant_vertical()); }
  Vec<Jet> eta_field() const { return normal_part(constant_vertical()); }

  /// Ambient tangent field sum_a y_a(u) X_a(u).
  Vec<Jet> tangent_field(const Vec<Jet>& frame_coeffs) const {
    Vec<Jet> r = zeros<Jet>(space_.dim());
    for (int a = 0; a < m_; ++a) axpy(r, frame_coeffs[a], frames1_.tangent[a]);
    return r;
  }

  /// Flat directional derivative D_X V at u, X in frame coordinates.
  Vecd derivative(const Vec<Jet>& v, const Vecd& x_frame) const {
    return directional(v, pg_.coord_direction(x_frame));
  }
  double derivative(const Jet& v, const Vecd& x_frame) const {
    return directional(v, pg_.coord_direction(x_frame));
  }

  /// Levi-Civita derivative nabla_X Y of a tangent field Y (ambient result).
  Vecd covariant_tangent(const Vec<Jet>& y, const Vecd& x_frame) const {
    return tangential_part(derivative(y, x_frame));
  }

  /// Normal connection derivative of a normal field xi (ambient result).
  Vecd covariant_normal(const Vec<Jet>& xi, const Vecd& x_frame) const {
    return normal_part(derivative(xi, x_frame));
  }

  /// (nabla_X alpha)(Y, Z) as an ambient normal vector; X, Y, Z in frame
  /// coordinates at u.
  Vecd alpha_covariant(const Vecd& x, const Vecd& y, const Vecd& z) const {
    const Vecd xc = pg_.coord_direction(x);
    const Vecd yc = pg_.coord_direction(y);
    const Vecd zc = pg_.coord_direction(z);
    Vec<Jet> ayz = zeros<Jet>(space_.dim());
    for (int k = 0; k < m_; ++k)
      for (int l = 0; l < m_; ++l)
        if (yc[k] != 0.0 && zc[l] != 0.0) axpy(ayz, yc[k] * zc[l], alpha1_[k][l]);
    Vecd r = normal_part(directional(ayz, xc));
    // - alpha(nabla_X Y, Z) - alpha(Y, nabla_X Z) for constant-coordinate Y, Z
    Vecd nxy(static_cast<std::size_t>(m_), 0.0);
    Vecd nxz(static_cast<std::size_t>(m_), 0.0);
    for (int p = 0; p < m_; ++p)
      for (int j = 0; j < m_; ++j)
        for (int k = 0; k < m_; ++k) {
          const double g = christoffel(p, j, k).value();
          nxy[p] += g * xc[j] * yc[k];
          nxz[p] += g * xc[j] * zc[k];
        }
    for (int p = 0; p < m_; ++p)
      for (int l = 0; l < m_; ++l) {
        axpy(r, -nxy[p] * zc[l], values(alpha1_[p][l]));
        axpy(r, -yc[l] * nxz[p], values(alpha1_[l][p]));
      }
    return r;
  }

  /// Riemann tensor R^l_{ijk} in coordinates: R(d_i, d_j) d_k = R^l_{ijk} d_l.
  double riemann(int l, int i, int j, int k) const {
    double r = christoffel(l, j, k).d(i) - christoffel(l, i, k).d(j);
    for (int p = 0; p < m_; ++p) {
      r += christoffel(p, j, k).value() * christoffel(l, i, p).value() -
           christoffel(p, i, k).value() * christoffel(l, j, p).value();
    }
    return r;
  }

  /// R(X, Y) Z from the metric alone, in frame coordinates.
  Vecd intrinsic_curvature(const Vecd& x, const Vecd& y, const Vecd& z) const {
    const Vecd xc = pg_.coord_direction(x);
    const Vecd yc = pg_.coord_direction(y);
    const Vecd zc = pg_.coord_direction(z);
    Vecd coord(static_cast<std::size_t>(m_), 0.0);
    for (int l = 0; l < m_; ++l)
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j)
          for (int k = 0; k < m_; ++k) {
            const double w = xc[i] * yc[j] * zc[k];
            if (w != 0.0) coord[l] += riemann(l, i, j, k) * w;
          }
    // coordinate vector -> ambient -> frame coordinates
    Vecd amb(static_cast<std::size_t>(space_.dim()), 0.0);
    for (int l = 0; l < m_; ++l) axpy(amb, coord[l], pg_.coord_tangent[l]);
    return tangent_coords(amb);
  }

  /// Normal connection forms omega^c_a(d_k) = <d_k nu_a, nu_c> (order 1).
  const std::vector<Jet>& connection_forms() const {
    if (!omega_) {
      const int r = normal_rank();
      std::vector<Jet> w(static_cast<std::size_t>(r * r * m_), Jet(0.0));
      for (int a = 0; a < r; ++a) {
        for (int k = 0; k < m_; ++k) {
          Vec<Jet> dnu;
          for (const auto& c : frames2_.normal[a]) dnu.push_back(c.partial(k));
          for (int c = 0; c < r; ++c) {
            w[(c * r + a) * m_ + k] = space_.inner(dnu, frames1_.normal[c]);
          }
        }
      }
      omega_ = std::make_shared<std::vector<Jet>>(std::move(w));
    }
    return *omega_;
  }

 private:
  Vec<Jet> constant_vertical() const {
    const Vecd v = space_.vertical();
    return Vec<Jet>(v.begin(), v.end());
  }

  AmbientSpace space_;
  int m_;
  Vecd u_;
  Vec<Jet> point2_;
  Vec<Jet> point1_;
  std::vector<Vec<Jet>> d1_;
  std::vector<std::vector<Vec<Jet>>> d2_;
  PointGeometry pg_;
  Frames<Jet> frames2_;
  Frames<Jet> frames1_;
  std::vector<std::vector<Vec<Jet>>> alpha1_;
  Mat<Jet> metric2_;
  std::vector<Jet> christoffel1_;
  mutable std::shared_ptr<std::vector<Mat<Jet>>> shape_jets_;
  mutable std::shared_ptr<std::vector<Jet>> omega_;
};

/// Ricci tensor from the induced metric (Christoffel symbols and their
/// derivatives), in frame coordinates.
inline Matd intrinsic_ricci(const LocalGeometry& lg) {
  const int m = lg.dim();
  Matd coord(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += lg.riemann(i, i, j, k);
      coord(j, k) = s;
    }
  const Matd& b = lg.point().basis;
  Matd r = b.transposed() * coord * b;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) r(i, j) = r(j, i) = 0.5 * (r(i, j) + r(j, i));
  return r;
}

inline Matd intrinsic_ricci(const ParametricImmersion& f, std::span<const double> u) {
  return intrinsic_ricci(LocalGeometry(f, u));
}

/// nabla^perp_X xi for a normal field xi built from the local jets.
/// Throws GeometryError if xi is not normal to f near u.
inline Vecd normal_connection_derivative(const LocalGeometry& lg, const JetField& xi,
                                         const Vecd& x_frame) {
  const Vec<Jet> field = xi(lg);
  const auto& space = lg.space();
  auto check_zero = [&](const Jet& j) {
    for (double c : j.coefficients())
      if (std::abs(c) > 1e-8) throw GeometryError("field is not normal to the immersion");
  };
  for (const auto& x : lg.frames1().tangent) check_zero(space.inner(field, x));
  check_zero(space.inner(field, space.inclusion_normal(lg.position1())));
  return lg.covariant_normal(field, x_frame);
}

inline Vecd normal_connection_derivative(const ParametricImmersion& f, std::span<const double> u,
                                         const JetField& xi, const Vecd& x_frame) {
  return normal_connection_derivative(LocalGeometry(f, u), xi, x_frame);
}

/// R^perp(X, Y) xi from the derivatives of the normal frame (connection
/// forms and their curvature). Arguments and result in frame coordinates.
inline Vecd normal_curvature(const LocalGeometry& lg, const Vecd& x, const Vecd& y,
                             const Vecd& xi) {
  const int m = lg.dim();
  const int r = lg.normal_rank();
  const auto& w = lg.connection_forms();
  auto om = [&](int c, int a, int k) -> const Jet& { return w[(c * r + a) * m + k]; };
  const Vecd xc = lg.point().coord_direction(x);
  const Vecd yc = lg.point().coord_direction(y);
  Vecd out(static_cast<std::size_t>(r), 0.0);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      const double wkl = xc[k] * yc[l];
      if (wkl == 0.0) continue;
      for (int a = 0; a < r; ++a) {
        if (xi[a] == 0.0) continue;
        for (int c = 0; c < r; ++c) {
          double v = om(c, a, l).d(k) - om(c, a, k).d(l);
          for (int b = 0; b < r; ++b) {
            v += om(b, a, l).value() * om(c, b, k).value() -
                 om(b, a, k).value() * om(c, b, l).value();
          }
          out[c] += wkl * xi[a] * v;
        }
      }
    }
  return out;
}

}  // namespace prodgeo
