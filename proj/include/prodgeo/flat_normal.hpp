#pragma once

// Analysis of immersions with flat normal bundle: class A, Einstein fit,
// the norm identity for the principal normals, their parallelism along
// {T}^perp, the decomposition of i o f in the flat container and the
// spherical / totally geodesic structure of the eigendistributions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "prodgeo/equations.hpp"
#include "prodgeo/geometry.hpp"
#include "prodgeo/principal.hpp"

namespace prodgeo {

inline constexpr double kClassATol = 1e-6;
inline constexpr double kEinsteinTol = 1e-6;
inline constexpr double kParallelHTol = 1e-5;
inline constexpr double kMinimalTol = 1e-8;
inline constexpr double kLiftTol = 1e-7;

// ---------------------------------------------------------------------------
// Class A
// ---------------------------------------------------------------------------

struct ClassAResult {
  bool is_class_a = true;
  std::optional<int> t_index;
  double defect = 0.0;
  bool t_vanishes = false;
};

/// T is an eigenvector of every shape operator. T = 0 counts as class A.
/// The decomposition, when given, must also place T inside one E_i.
inline ClassAResult class_a_test(const PointGeometry& pg, double tol = kClassATol,
                                 const PrincipalDecomposition* dec = nullptr) {
  ClassAResult r;
  const double tn = norm(pg.T);
  if (tn < kTZeroTol) {
    r.t_vanishes = true;
    return r;
  }
  const double t2 = tn * tn;
  for (const auto& A : pg.alpha) {
    const Vecd at = A * pg.T;
    const Vecd perp = at - scaled(pg.T, dot(at, pg.T) / t2);
    r.defect = std::max(r.defect, norm(perp));
  }
  r.is_class_a = r.defect <= tol;
  if (dec != nullptr) {
    bool inside = false;
    for (int i = 0; i < dec->s; ++i) {
      if (norm(dec->component(i, pg.T)) > (1.0 - tol) * tn) {
        inside = true;
        r.t_index = i;
      }
    }
    r.is_class_a = r.is_class_a && inside;
  }
  return r;
}

inline ClassAResult class_a_test(const ParametricImmersion& f, std::span<const double> u,
                                 double tol = kClassATol) {
  const PointGeometry pg = point_geometry(f, u);
  if (flatness_test(pg).is_flat) {
    const PrincipalDecomposition dec = principal_decomposition(pg);
    return class_a_test(pg, tol, &dec);
  }
  return class_a_test(pg, tol);
}

// ---------------------------------------------------------------------------
// Einstein fit
// ---------------------------------------------------------------------------

struct EinsteinFit {
  double lambda_hat = 0.0;
  double max_dev = 0.0;
  bool is_einstein = false;
  double tolerance = kEinsteinTol;
  int samples = 0;
};

/// lambda_hat = mean of tr(Ric)/m; max_dev = max |Ric - lambda_hat I|.
inline EinsteinFit einstein_fit(const std::vector<Matd>& ricci, double tol = kEinsteinTol) {
  if (ricci.empty()) throw DomainError("einstein_fit: need at least one sample");
  EinsteinFit fit;
  fit.tolerance = tol;
  fit.samples = static_cast<int>(ricci.size());
  for (const auto& r : ricci) {
    double tr = 0.0;
    for (int i = 0; i < r.rows(); ++i) tr += r(i, i);
    fit.lambda_hat += tr / r.rows();
  }
  fit.lambda_hat /= static_cast<double>(ricci.size());
  for (const auto& r : ricci) {
    const Matd dev = r - Matd::identity(r.rows()) * fit.lambda_hat;
    fit.max_dev = std::max(fit.max_dev, max_abs(dev));
  }
  fit.is_einstein = fit.max_dev <= tol;
  return fit;
}

inline EinsteinFit einstein_fit(const ParametricImmersion& f, const std::vector<Vecd>& samples,
                                double tol = kEinsteinTol) {
  std::vector<Matd> ric;
  for (const auto& u : samples) ric.push_back(extrinsic_ricci(point_geometry(f, u)));
  return einstein_fit(ric, tol);
}

// ---------------------------------------------------------------------------
// Norm identity for principal normals
// ---------------------------------------------------------------------------

struct IdentityEntry {
  int k = 0;
  bool applicable = true;
  double lhs = 0.0;  // ||xi_k - (m/2) H||^2
  double rhs = 0.0;  // (m^2/4)||H||^2 - lambda + (m-2) eps + ||eta||^2 eps
  double residual = 0.0;
  double mxi_lhs = 0.0;  // m <xi_k, H>
  double mxi_rhs = 0.0;  // lambda - (m-2) eps - ||eta||^2 eps + ||xi_k||^2
  double mxi_residual = 0.0;
};

struct IdentityReport {
  double lambda = 0.0;
  std::vector<IdentityEntry> entries;

  double max_residual() const {
    double r = 0.0;
    for (const auto& e : entries)
      if (e.applicable) r = std::max({r, e.residual, e.mxi_residual});
    return r;
  }
  double min_rhs() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& e : entries)
      if (e.applicable) r = std::min(r, e.rhs);
    return r;
  }
};

/// Block k is applicable unless it is spanned by T alone (then E_k meets
/// {T}^perp trivially and the Gauss-equation argument has no direction).
inline IdentityReport xi_identity_report(const PointGeometry& pg,
                                         const PrincipalDecomposition& dec, double lambda) {
  if (!flatness_test(pg).is_flat) throw FlatnessError("xi_identity_report: normal bundle not flat");
  IdentityReport rep;
  rep.lambda = lambda;
  const double m = pg.m;
  const double eps = pg.epsilon;
  const double eta2 = dot(pg.eta, pg.eta);
  for (int k = 0; k < dec.s; ++k) {
    IdentityEntry e;
    e.k = k;
    e.applicable = !(dec.t_index && *dec.t_index == k && dec.dims[k] == 1);
    const Vecd d = dec.xi[k] - scaled(pg.H, m / 2.0);
    e.lhs = dot(d, d);
    e.rhs = m * m / 4.0 * dot(pg.H, pg.H) - lambda + (m - 2.0) * eps + eta2 * eps;
    e.residual = std::abs(e.lhs - e.rhs);
    e.mxi_lhs = m * dot(dec.xi[k], pg.H);
    e.mxi_rhs = lambda - (m - 2.0) * eps - eta2 * eps + dot(dec.xi[k], dec.xi[k]);
    e.mxi_residual = std::abs(e.mxi_lhs - e.mxi_rhs);
    rep.entries.push_back(e);
  }
  return rep;
}

/// Same, with lambda taken from an accepted Einstein fit.
inline IdentityReport xi_identity_report(const PointGeometry& pg,
                                         const PrincipalDecomposition& dec,
                                         const EinsteinFit& fit) {
  if (!fit.is_einstein) {
    throw NotEinsteinError("xi_identity_report: Einstein fit rejected (max deviation " +
                           std::to_string(fit.max_dev) + ")");
  }
  return xi_identity_report(pg, dec, fit.lambda_hat);
}

// ---------------------------------------------------------------------------
// Parallelism of principal normals along {T}^perp
// ---------------------------------------------------------------------------

namespace detail {

/// Orthonormal basis (columns) of the complement of v in R^m; all of R^m
/// when v vanishes.
inline std::vector<Vecd> complement_basis(const Vecd& v, int m) {
  std::vector<Vecd> out;
  std::vector<Vecd> ortho;
  const double vn = norm(v);
  if (vn >= kTZeroTol) ortho.push_back(scaled(v, 1.0 / vn));
  for (int j = 0; j < m && static_cast<int>(ortho.size()) < m; ++j) {
    Vecd e(static_cast<std::size_t>(m), 0.0);
    e[j] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& w : ortho) axpy(e, -dot(e, w), w);
    const double en = norm(e);
    if (en < 1e-8) continue;
    e = scaled(e, 1.0 / en);
    ortho.push_back(e);
    out.push_back(e);
  }
  return out;
}

}  // namespace detail

/// ||nabla^perp H|| over the frame directions.
inline double mean_curvature_derivative(const LocalGeometry& lg) {
  const int m = lg.dim();
  Vec<Jet> h = zeros<Jet>(lg.space().dim());
  for (int a = 0; a < m; ++a) h = h + lg.alpha_frame(a, a);
  h = scaled(h, 1.0 / m);
  double r = 0.0;
  for (int a = 0; a < m; ++a) {
    Vecd x(static_cast<std::size_t>(m), 0.0);
    x[a] = 1.0;
    r = std::max(r, norm(lg.covariant_normal(h, x)));
  }
  return r;
}

/// max over blocks i and unit Z in {T}^perp (a basis) of ||nabla^perp_Z xi_i||.
inline double parallelism_residual(const LocalGeometry& lg, const PrincipalDecomposition& dec) {
  if (!flatness_test(lg.point()).is_flat) throw FlatnessError("parallelism_residual: normal bundle not flat");
  const DecompositionJets dj(lg, dec);
  double r = 0.0;
  const auto zs = detail::complement_basis(lg.point().T, lg.dim());
  for (int i = 0; i < dec.s; ++i) {
    const Vec<Jet> xi = dj.xi_field(i);
    for (const auto& z : zs) r = std::max(r, norm(lg.covariant_normal(xi, z)));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Decomposition of i o f
// ---------------------------------------------------------------------------

/// One block of the refined decomposition span{T} + (E_t meet T^perp) + ...
struct LiftedBlock {
  std::string label;       // "T", "E_t^perp" or "E_<i>"
  int source = -1;         // block of f it comes from
  Matd basis;              // tangent-frame coordinates, orthonormal columns
  Vecd xi;                 // principal normal of f (normal-frame coordinates)
  Vecd lifted_normal;      // principal normal of i o f (ambient coordinates)
  double residual = 0.0;   // max coordinate deviation of alpha_{i o f} on the block
};

struct LiftedDecomposition {
  std::vector<LiftedBlock> blocks;
  double cross_residual = 0.0;  // alpha_{i o f} between different blocks
  bool includes_t_block = false;

  double max_residual() const {
    double r = cross_residual;
    for (const auto& b : blocks) r = std::max(r, b.residual);
    return r;
  }
};

namespace detail {

/// Splits the block holding T into span{T} and its complement. Blocks are
/// returned in the order: T, E_t meet T^perp (if nonzero), other blocks.
inline std::vector<LiftedBlock> refined_blocks(const PointGeometry& pg,
                                               const PrincipalDecomposition& dec,
                                               bool with_t) {
  std::vector<LiftedBlock> out;
  const int m = pg.m;
  const double tn = norm(pg.T);
  if (with_t) {
    const int t = *dec.t_index;
    LiftedBlock b;
    b.label = "T";
    b.source = t;
    b.basis = Matd(m, 1);
    for (int a = 0; a < m; ++a) b.basis(a, 0) = pg.T[a] / tn;
    b.xi = dec.xi[t];
    out.push_back(b);
    if (dec.dims[t] >= 2) {
      // orthonormal complement of T inside E_t
      std::vector<Vecd> cols;
      std::vector<Vecd> ortho{b.basis.column(0)};
      for (int j = 0; j < dec.dims[t]; ++j) {
        Vecd v = dec.bases[t].column(j);
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& w : ortho) axpy(v, -dot(v, w), w);
        const double vn = norm(v);
        if (vn < 1e-6) continue;
        v = scaled(v, 1.0 / vn);
        ortho.push_back(v);
        cols.push_back(v);
      }
      LiftedBlock c;
      c.label = "E_t^perp";
      c.source = t;
      c.basis = Matd(m, static_cast<int>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j)
        for (int a = 0; a < m; ++a) c.basis(a, static_cast<int>(j)) = cols[j][a];
      c.xi = dec.xi[t];
      out.push_back(c);
    }
  }
  for (int i = 0; i < dec.s; ++i) {
    if (with_t && i == *dec.t_index) continue;
    LiftedBlock b;
    b.label = "E_" + std::to_string(i);
    b.source = i;
    b.basis = dec.bases[i];
    b.xi = dec.xi[i];
    out.push_back(b);
  }
  return out;
}

}  // namespace detail

/// Principal normals of i o f in the flat container, each verified against
/// alpha_{i o f} = (Hessian of f) minus its tangential part, computed
/// directly in E^{n+2}.
/// T must not vanish unless `allow_vanishing_t` (then the span{T} block is
/// omitted and the remaining blocks are still verified).
inline LiftedDecomposition lifted_decomposition(const LocalGeometry& lg,
                                                const PrincipalDecomposition& dec,
                                                bool allow_vanishing_t = false) {
  const PointGeometry& pg = lg.point();
  if (!flatness_test(pg).is_flat) throw FlatnessError("lifted_decomposition: normal bundle not flat");
  const bool t_ok = norm(pg.T) > kTZeroTol;
  if (!t_ok && !allow_vanishing_t) {
    throw DegenerateTError("lifted_decomposition: T vanishes, span{T} block undefined");
  }
  if (t_ok && !dec.t_index) {
    throw GeometryError("lifted_decomposition: T lies in no eigendistribution (not class A)");
  }
  const auto& space = lg.space();
  const double eps = pg.epsilon;
  const double eta2 = dot(pg.eta, pg.eta);
  const Vecd nbar = space.inclusion_normal(pg.point);
  LiftedDecomposition out;
  out.includes_t_block = t_ok;
  out.blocks = detail::refined_blocks(pg, dec, t_ok);
  for (auto& b : out.blocks) {
    b.lifted_normal = pg.normal_ambient(b.xi);
    axpy(b.lifted_normal, b.label == "T" ? -eps * eta2 : -eps, nbar);
  }

  // alpha of i o f in the flat container: d_k d_l f minus its tangential part.
  const int m = pg.m;
  auto alpha_flat = [&](const Vecd& x, const Vecd& y) {
    const Vecd xc = pg.coord_direction(x);
    const Vecd yc = pg.coord_direction(y);
    Vecd h(static_cast<std::size_t>(space.dim()), 0.0);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) axpy(h, xc[k] * yc[l], values(lg.coord_hessian(k, l)));
    return h - lg.tangential_part(h);
  };
  for (std::size_t bi = 0; bi < out.blocks.size(); ++bi) {
    auto& b = out.blocks[bi];
    for (int p = 0; p < b.basis.cols(); ++p)
      for (int q = p; q < b.basis.cols(); ++q) {
        Vecd d = alpha_flat(b.basis.column(p), b.basis.column(q));
        if (p == q) d = d - b.lifted_normal;
        b.residual = std::max(b.residual, max_abs(d));
      }
    for (std::size_t bj = bi + 1; bj < out.blocks.size(); ++bj) {
      const auto& c = out.blocks[bj];
      for (int p = 0; p < b.basis.cols(); ++p)
        for (int q = 0; q < c.basis.cols(); ++q)
          out.cross_residual =
              std::max(out.cross_residual, max_abs(alpha_flat(b.basis.column(p), c.basis.column(q))));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spherical / totally geodesic distributions
// ---------------------------------------------------------------------------

struct DistributionEntry {
  std::string label;
  int source = -1;
  Vecd delta;  // tangent-frame coordinates
  double umbilicity = 0.0;
  double sphericity = 0.0;
  double totally_geodesic = 0.0;
};

struct DistributionReport {
  std::vector<DistributionEntry> entries;
  double min_independence_angle = std::numeric_limits<double>::infinity();  // radians

  double max_residual() const {
    double r = 0.0;
    for (const auto& e : entries) r = std::max({r, e.umbilicity, e.sphericity, e.totally_geodesic});
    return r;
  }
};

/// min over distinct i, j, k of the angle between xi_i - xi_k and xi_j - xi_k
/// (folded into [0, pi/2]); +inf when s < 3.
inline double independence_angle(const PrincipalDecomposition& dec) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dec.s; ++i)
    for (int j = 0; j < dec.s; ++j)
      for (int k = 0; k < dec.s; ++k) {
        if (i == j || j == k || i == k) continue;
        const Vecd a = dec.xi[i] - dec.xi[k];
        const Vecd b = dec.xi[j] - dec.xi[k];
        const double c = std::clamp(std::abs(dot(a, b)) / (norm(a) * norm(b)), 0.0, 1.0);
        best = std::min(best, std::acos(c));
      }
  return best;
}

/// For each block E_k of the refined decomposition other than span{T}:
///   umbilicity  max |<nabla_X Y, Z> - <X,Y><delta,Z>|, X,Y in E_k, Z in E_k^perp
///   sphericity  max |<nabla_X delta, Z>|,                X in E_k, Z in E_k^perp
///   totally geodesic complement  max |<nabla_X Y, Z>|, X in E_i, Y in E_j, Z in E_k,
///                                                     i, j != k
/// with delta = -<xi_k, eta> T / |T|^2.
inline DistributionReport distribution_checks(const LocalGeometry& lg,
                                              const PrincipalDecomposition& dec) {
  const PointGeometry& pg = lg.point();
  if (!flatness_test(pg).is_flat) throw FlatnessError("distribution_checks: normal bundle not flat");
  const double tn = norm(pg.T);
  if (tn <= kTZeroTol) throw DegenerateTError("distribution_checks: T vanishes");
  if (!dec.t_index) throw GeometryError("distribution_checks: T lies in no eigendistribution (not class A)");
  const auto& space = lg.space();
  const DecompositionJets dj(lg, dec);
  const auto blocks = detail::refined_blocks(pg, dec, true);
  const int t = *dec.t_index;

  // Jet projectors of the refined blocks.
  std::vector<Mat<Jet>> proj;
  const Mat<Jet> pt = dj.t_projector();
  for (const auto& b : blocks) {
    if (b.label == "T") {
      proj.push_back(pt);
    } else if (b.label == "E_t^perp") {
      proj.push_back(dj.projector(t) - pt);
    } else {
      proj.push_back(dj.projector(b.source));
    }
  }
  auto cov = [&](std::size_t j, const Vecd& y, const Vecd& x) {
    return lg.covariant_tangent(dj.project_section(proj[j], y), x);
  };

  const Vec<Jet> eta = lg.eta_field();
  const Vec<Jet> tf = lg.t_field();
  const Jet t2 = space.inner(tf, tf);

  DistributionReport rep;
  rep.min_independence_angle = independence_angle(dec);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& bk = blocks[k];
    if (bk.label == "T") continue;
    DistributionEntry e;
    e.label = bk.label;
    e.source = bk.source;
    e.delta = scaled(pg.T, -dot(bk.xi, pg.eta) / (tn * tn));
    // delta as a field
    const Vec<Jet> xi = dj.xi_field(bk.source);
    const Jet coef = -space.inner(xi, eta) * recip(t2);
    const Vec<Jet> delta = scaled(tf, coef);

    std::vector<Vecd> perp;  // basis of E_k^perp
    for (std::size_t j = 0; j < blocks.size(); ++j)
      if (j != k)
        for (int c = 0; c < blocks[j].basis.cols(); ++c) perp.push_back(blocks[j].basis.column(c));

    for (int a = 0; a < bk.basis.cols(); ++a) {
      const Vecd x = bk.basis.column(a);
      for (int b = 0; b < bk.basis.cols(); ++b) {
        const Vecd y = bk.basis.column(b);
        const Vecd nab = cov(k, y, x);
        for (const auto& z : perp) {
          const double v = space.inner(nab, pg.tangent_ambient(z)) - dot(x, y) * dot(e.delta, z);
          e.umbilicity = std::max(e.umbilicity, std::abs(v));
        }
      }
      const Vecd nd = lg.covariant_tangent(delta, x);
      for (const auto& z : perp)
        e.sphericity = std::max(e.sphericity, std::abs(space.inner(nd, pg.tangent_ambient(z))));
    }
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (i == k || j == k) continue;
        for (int a = 0; a < blocks[i].basis.cols(); ++a)
          for (int b = 0; b < blocks[j].basis.cols(); ++b) {
            const Vecd nab = cov(j, blocks[j].basis.column(b), blocks[i].basis.column(a));
            for (int c = 0; c < bk.basis.cols(); ++c) {
              const double v = space.inner(nab, pg.tangent_ambient(bk.basis.column(c)));
              e.totally_geodesic = std::max(e.totally_geodesic, std::abs(v));
            }
          }
      }
    rep.entries.push_back(e);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Ricci bound for minimal immersions
// ---------------------------------------------------------------------------

struct MinimalRicciBound {
  double max_ricci = -std::numeric_limits<double>::infinity();  // max Ric(X) over unit X
  double gap = 0.0;                                             // max_ricci - eps
  bool is_slice_equality = false;
};

/// Ric(X) = Ric(X,X)/(m-1) maximised exactly (largest eigenvalue) at each
/// sample. Throws NotMinimalError when |H| >= tol somewhere.
inline MinimalRicciBound minimal_ricci_bound(const ParametricImmersion& f,
                                             const std::vector<Vecd>& samples,
                                             double tol = kMinimalTol) {
  if (samples.empty()) throw DomainError("minimal_ricci_bound: need at least one sample");
  MinimalRicciBound r;
  bool slice = true;
  int eps = 1;
  for (const auto& u : samples) {
    const PointGeometry pg = point_geometry(f, u);
    eps = pg.epsilon;
    if (norm(pg.H) >= tol) {
      throw NotMinimalError("minimal_ricci_bound: |H| = " + std::to_string(norm(pg.H)) +
                            " is not below " + std::to_string(tol));
    }
    const Matd ric = extrinsic_ricci(pg);
    const auto eig = symmetric_eigen(ric);
    r.max_ricci = std::max(r.max_ricci, eig.values.back() / (pg.m - 1.0));
    double amax = 0.0;
    for (const auto& a : pg.alpha) amax = std::max(amax, max_abs(a));
    slice = slice && amax < tol && norm(pg.T) < tol;
  }
  r.gap = r.max_ricci - eps;
  r.is_slice_equality = slice && std::abs(r.gap) < 1e-9;
  return r;
}

}  // namespace prodgeo
