#pragma once

// Residuals of the Gauss, Codazzi and Ricci equations of a submanifold of
// Q^n_eps x R, of the two identities satisfied by the vertical field, and of
// the Codazzi equation written for a flat normal bundle.
//
// Every left-hand side is computed from a different pipeline than its
// right-hand side (metric-jet curvature vs shape operators, jet derivative
// of ambient alpha vs the T/eta split, normal-frame connection forms vs
// commutators), so a vanishing residual is a genuine check.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "prodgeo/geometry.hpp"
#include "prodgeo/principal.hpp"

namespace prodgeo {

inline constexpr double kGaussTol = 1e-6;
inline constexpr double kCodazziTol = 1e-5;
inline constexpr double kRicciEquationTol = 1e-7;
inline constexpr double kVerticalTol = 1e-6;
inline constexpr double kRicciTensorTol = 1e-6;
inline constexpr double kCodazziFlatTol = 1e-5;

struct EquationResidual {
  std::string name;
  double max_abs = 0.0;
  int samples = 0;
  double tolerance = 0.0;
  bool pass = true;

  void add(double v) {
    max_abs = std::max(max_abs, std::abs(v));
    ++samples;
    pass = max_abs <= tolerance;
  }
};

inline EquationResidual make_residual(std::string name, double tol) {
  return EquationResidual{std::move(name), 0.0, 0, tol, true};
}

namespace detail {

// (X ^ Y) Z = <Y, Z> X - <X, Z> Y in frame coordinates.
inline Vecd wedge(const Vecd& x, const Vecd& y, const Vecd& z) {
  return scaled(x, dot(y, z)) - scaled(y, dot(x, z));
}

}  // namespace detail

/// R(X,Y)Z - [A_{alpha(Y,Z)}X - A_{alpha(X,Z)}Y
///            + eps (X^Y + <X,T> Y^T - <Y,T> X^T) Z], frame coordinates.
inline Vecd gauss_residual(const LocalGeometry& lg, const Vecd& x, const Vecd& y, const Vecd& z) {
  const PointGeometry& pg = lg.point();
  const double eps = pg.epsilon;
  Vecd rhs = pg.shape(pg.alpha_of(y, z)) * x - pg.shape(pg.alpha_of(x, z)) * y;
  Vecd w = detail::wedge(x, y, z) + scaled(detail::wedge(y, pg.T, z), dot(x, pg.T)) -
           scaled(detail::wedge(x, pg.T, z), dot(y, pg.T));
  axpy(rhs, eps, w);
  return lg.intrinsic_curvature(x, y, z) - rhs;
}

/// (nabla_X alpha)(Y,Z) - (nabla_Y alpha)(X,Z) - eps <(X^Y)T, Z> eta, ambient.
inline Vecd codazzi_residual(const LocalGeometry& lg, const Vecd& x, const Vecd& y,
                             const Vecd& z) {
  const PointGeometry& pg = lg.point();
  const double c = pg.epsilon * dot(detail::wedge(x, y, pg.T), z);
  Vecd r = lg.alpha_covariant(x, y, z) - lg.alpha_covariant(y, x, z);
  axpy(r, -c, pg.normal_ambient(pg.eta));
  return r;
}

/// <R^perp(X,Y) xi, zeta> - <[A_xi, A_zeta] X, Y>; xi, zeta in normal-frame
/// coordinates.
inline double ricci_equation_residual(const LocalGeometry& lg, const Vecd& x, const Vecd& y,
                                      const Vecd& xi, const Vecd& zeta) {
  const PointGeometry& pg = lg.point();
  const double lhs = dot(normal_curvature(lg, x, y, xi), zeta);
  const double rhs = dot(commutator(pg.shape(xi), pg.shape(zeta)) * x, y);
  return lhs - rhs;
}

/// Both sides of the Ricci equation, for reporting magnitudes.
inline std::pair<double, double> ricci_equation_sides(const LocalGeometry& lg, const Vecd& x,
                                                      const Vecd& y, const Vecd& xi,
                                                      const Vecd& zeta) {
  const PointGeometry& pg = lg.point();
  if (static_cast<int>(xi.size()) != pg.normal_rank || static_cast<int>(zeta.size()) != pg.normal_rank) {
    throw DomainError("ricci_equation_sides: normal vectors need " + std::to_string(pg.normal_rank) +
                      " frame coordinates");
  }
  return {dot(normal_curvature(lg, x, y, xi), zeta),
          dot(commutator(pg.shape(xi), pg.shape(zeta)) * x, y)};
}

/// |nabla_X T - A_eta X| and |alpha(X,T) + nabla^perp_X eta| for direction x.
inline std::pair<double, double> vertical_field_pointwise(const LocalGeometry& lg, const Vecd& x) {
  const PointGeometry& pg = lg.point();
  const Vecd lhs_t = lg.tangent_coords(lg.covariant_tangent(lg.t_field(), x));
  const Vecd rhs_t = pg.shape(pg.eta) * x;
  const Vecd a = pg.normal_ambient(pg.alpha_of(x, pg.T));
  const Vecd b = lg.covariant_normal(lg.eta_field(), x);
  return {norm(lhs_t - rhs_t), norm(a + b)};
}

struct VerticalResiduals {
  EquationResidual nabla_t = make_residual("nabla_T", kVerticalTol);
  EquationResidual alpha_t = make_residual("alpha_T", kVerticalTol);
};

/// Residuals of nabla_X T = A_eta X and alpha(X,T) = -nabla^perp_X eta over
/// the frame directions at u.
inline VerticalResiduals vertical_field_residuals(const LocalGeometry& lg,
                                                  double tol = kVerticalTol) {
  VerticalResiduals r;
  r.nabla_t.tolerance = r.alpha_t.tolerance = tol;
  for (int a = 0; a < lg.dim(); ++a) {
    Vecd x(static_cast<std::size_t>(lg.dim()), 0.0);
    x[a] = 1.0;
    const auto [p, q] = vertical_field_pointwise(lg, x);
    r.nabla_t.add(p);
    r.alpha_t.add(q);
  }
  return r;
}

inline VerticalResiduals vertical_field_residuals(const ParametricImmersion& f,
                                                  std::span<const double> u,
                                                  double tol = kVerticalTol) {
  return vertical_field_residuals(LocalGeometry(f, u), tol);
}

inline Vecd gauss_residual(const ParametricImmersion& f, std::span<const double> u,
                           const Vecd& x, const Vecd& y, const Vecd& z) {
  return gauss_residual(LocalGeometry(f, u), x, y, z);
}

inline Vecd codazzi_residual(const ParametricImmersion& f, std::span<const double> u,
                             const Vecd& x, const Vecd& y, const Vecd& z) {
  return codazzi_residual(LocalGeometry(f, u), x, y, z);
}

inline double ricci_equation_residual(const ParametricImmersion& f, std::span<const double> u,
                                      const Vecd& x, const Vecd& y, const Vecd& xi,
                                      const Vecd& zeta) {
  return ricci_equation_residual(LocalGeometry(f, u), x, y, xi, zeta);
}

/// Codazzi equation for a flat normal bundle, in both of its forms:
///   <X_j,Y_j>(nabla^perp_{X_i} xi_j + eps <X_i,T> eta) - <nabla_{X_j} Y_j, X_i>(xi_j - xi_i)
/// for i != j, and
///   <nabla_{X_j} X_i, X_k>(xi_i - xi_k) - <nabla_{X_i} X_j, X_k>(xi_j - xi_k)
/// for distinct i, j, k. X's run over the block bases. Each entry is the
/// ambient norm of one residual vector; empty when s = 1.
inline std::vector<double> codazzi_flat_residual(const LocalGeometry& lg,
                                                 const PrincipalDecomposition& dec) {
  std::vector<double> out;
  if (dec.s < 2) return out;
  const PointGeometry& pg = lg.point();
  if (!flatness_test(pg).is_flat) throw FlatnessError("codazzi_flat_residual: normal bundle not flat");
  const DecompositionJets dj(lg, dec);
  const double eps = pg.epsilon;
  const Vecd eta = pg.normal_ambient(pg.eta);
  std::vector<Vec<Jet>> xi_fields;
  for (int i = 0; i < dec.s; ++i) xi_fields.push_back(dj.xi_field(i));

  for (int i = 0; i < dec.s; ++i)
    for (int j = 0; j < dec.s; ++j) {
      if (i == j) continue;
      const Vecd dxi = pg.normal_ambient(dec.xi[j] - dec.xi[i]);
      for (int a = 0; a < dec.dims[i]; ++a) {
        const Vecd xi_dir = dec.bases[i].column(a);
        const Vecd nxi = lg.covariant_normal(xi_fields[j], xi_dir);
        for (int b = 0; b < dec.dims[j]; ++b)
          for (int c = 0; c < dec.dims[j]; ++c) {
            const Vecd xj = dec.bases[j].column(b);
            const Vecd yj = dec.bases[j].column(c);
            const double g = dot(xj, yj);
            const Vecd nab = lg.covariant_tangent(dj.section(j, yj), xj);
            const double h = lg.space().inner(nab, pg.tangent_ambient(xi_dir));
            Vecd r = scaled(nxi, g);
            axpy(r, g * eps * dot(xi_dir, pg.T), eta);
            axpy(r, -h, dxi);
            out.push_back(norm(r));
          }
      }
    }
  for (int i = 0; i < dec.s; ++i)
    for (int j = 0; j < dec.s; ++j)
      for (int k = 0; k < dec.s; ++k) {
        if (i == j || j == k || i == k) continue;
        for (int a = 0; a < dec.dims[i]; ++a)
          for (int b = 0; b < dec.dims[j]; ++b)
            for (int c = 0; c < dec.dims[k]; ++c) {
              const Vecd xi_ = dec.bases[i].column(a);
              const Vecd xj = dec.bases[j].column(b);
              const Vecd xk = pg.tangent_ambient(dec.bases[k].column(c));
              const double p =
                  lg.space().inner(lg.covariant_tangent(dj.section(i, xi_), xj), xk);
              const double q =
                  lg.space().inner(lg.covariant_tangent(dj.section(j, xj), xi_), xk);
              Vecd r = scaled(pg.normal_ambient(dec.xi[i] - dec.xi[k]), p);
              axpy(r, -q, pg.normal_ambient(dec.xi[j] - dec.xi[k]));
              out.push_back(norm(r));
            }
      }
  return out;
}

inline std::vector<double> codazzi_flat_residual(const ParametricImmersion& f,
                                                 std::span<const double> u,
                                                 const PrincipalDecomposition& dec) {
  return codazzi_flat_residual(LocalGeometry(f, u), dec);
}

/// max |extrinsic Ric - intrinsic Ric| at u.
inline double ricci_tensor_residual(const LocalGeometry& lg) {
  return max_abs(extrinsic_ricci(lg.point()) - intrinsic_ricci(lg));
}

}  // namespace prodgeo
