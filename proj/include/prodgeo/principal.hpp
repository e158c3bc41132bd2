#pragma once

// Flat normal bundle detection and the principal-normal decomposition
// T_xM = E_1 + ... + E_s with alpha(X, Y) = <X, Y> xi_i on E_i.
//
// The pointwise decomposition is computed in doubles. Its smooth
// continuation near the point (projectors onto E_i, the fields xi_i and
// sections of E_i) is rebuilt from the shape-operator jets so that
// covariant derivatives of these objects come out exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "prodgeo/errors.hpp"
#include "prodgeo/geometry.hpp"
#include "prodgeo/linalg.hpp"

namespace prodgeo {

inline constexpr double kDefaultFlatTol = 1e-8;
inline constexpr double kDefaultClusterTol = 1e-5;
inline constexpr double kTZeroTol = 1e-8;

struct FlatnessResult {
  bool is_flat = true;
  double max_commutator = 0.0;
  double scale = 0.0;  // max ||A_b||^2 (Frobenius)
};

/// Commuting test for the shape operators of the normal frame.
inline FlatnessResult flatness_test(const PointGeometry& pg, double tol = kDefaultFlatTol) {
  FlatnessResult r;
  double amax = 0.0;
  for (const auto& a : pg.alpha) amax = std::max(amax, frobenius(a));
  r.scale = amax * amax;
  for (int a = 0; a < pg.normal_rank; ++a)
    for (int b = a + 1; b < pg.normal_rank; ++b)
      r.max_commutator = std::max(r.max_commutator, frobenius(commutator(pg.alpha[a], pg.alpha[b])));
  r.is_flat = r.max_commutator <= tol * r.scale;
  return r;
}

inline FlatnessResult flatness_test(const ParametricImmersion& f, std::span<const double> u,
                                    double tol = kDefaultFlatTol) {
  return flatness_test(point_geometry(f, u), tol);
}

struct PrincipalDecomposition {
  int s = 0;
  std::vector<Vecd> xi;     // normal-frame coordinates
  std::vector<Matd> bases;  // m x dims[i], orthonormal columns (tangent-frame coordinates)
  std::vector<int> dims;
  std::optional<int> t_index;
  double gap = 0.0;  // min_{i != j} ||xi_i - xi_j||; +inf when s = 1
  Vecd combination;  // coefficients of the generic combination that separated the blocks
  double reconstruction_residual = 0.0;

  /// Orthogonal projector onto E_i (tangent-frame coordinates).
  Matd projector(int i) const { return bases[i] * bases[i].transposed(); }

  /// Component X^i of x in E_i.
  Vecd component(int i, const Vecd& x) const { return projector(i) * x; }

  /// Block containing x (largest projection).
  int block_of(const Vecd& x) const {
    int best = 0;
    double bv = -1.0;
    for (int i = 0; i < s; ++i) {
      const double v = norm(component(i, x));
      if (v > bv) {
        bv = v;
        best = i;
      }
    }
    return best;
  }
};

namespace detail {

// Single-linkage clustering of points with threshold `tol`.
inline std::vector<int> single_linkage(const std::vector<Vecd>& pts, double tol) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (norm(pts[i] - pts[j]) < tol) parent[find(i)] = find(j);
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<int> root_label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_label[r] < 0) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

struct DecompositionDraw {
  bool ok = false;
  PrincipalDecomposition dec;
};

inline DecompositionDraw decompose_once(const PointGeometry& pg, const Vecd& c, double scale,
                                        double cluster_tol) {
  const int m = pg.m;
  const int r = pg.normal_rank;
  DecompositionDraw out;
  Matd C(m, m);
  for (int b = 0; b < r; ++b) C = C + pg.alpha[b] * c[b];
  const auto eig = symmetric_eigen(C);
  std::vector<Vecd> vecs;
  std::vector<Vecd> xis;
  for (int a = 0; a < m; ++a) {
    vecs.push_back(eig.vectors.column(a));
    xis.push_back(pg.alpha_of(vecs.back(), vecs.back()));
  }
  const std::vector<int> label = single_linkage(xis, cluster_tol * scale);
  const int s = 1 + *std::max_element(label.begin(), label.end());

  struct Block {
    std::vector<int> members;
    Vecd xi;
  };
  std::vector<Block> blocks(static_cast<std::size_t>(s));
  for (int a = 0; a < m; ++a) blocks[label[a]].members.push_back(a);
  for (auto& b : blocks) {
    b.xi.assign(static_cast<std::size_t>(r), 0.0);
    for (int a : b.members) axpy(b.xi, 1.0 / b.members.size(), xis[a]);
  }
  // alpha(v_a, v_b) = delta_ab xi_{block(a)} must hold exactly in a valid split.
  double verify = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      Vecd d = pg.alpha_of(vecs[a], vecs[b]);
      if (a == b) d = d - blocks[label[a]].xi;
      verify = std::max(verify, norm(d));
    }
  if (verify > std::sqrt(cluster_tol) * 1e-2 * scale) return out;

  // Deterministic block order: by |xi|, then multiplicity, then the
  // generic eigenvalue.
  std::vector<int> order(static_cast<std::size_t>(s));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const double nx = norm(blocks[x].xi);
    const double ny = norm(blocks[y].xi);
    if (std::abs(nx - ny) > cluster_tol * scale) return nx < ny;
    if (blocks[x].members.size() != blocks[y].members.size())
      return blocks[x].members.size() < blocks[y].members.size();
    return dot(c, blocks[x].xi) < dot(c, blocks[y].xi);
  });

  PrincipalDecomposition& dec = out.dec;
  dec.s = s;
  dec.combination = c;
  for (int idx : order) {
    const Block& b = blocks[idx];
    Matd basis(m, static_cast<int>(b.members.size()));
    for (std::size_t j = 0; j < b.members.size(); ++j)
      for (int i = 0; i < m; ++i) basis(i, static_cast<int>(j)) = vecs[b.members[j]][i];
    dec.bases.push_back(basis);
    dec.xi.push_back(b.xi);
    dec.dims.push_back(static_cast<int>(b.members.size()));
  }
  dec.gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j) dec.gap = std::min(dec.gap, norm(dec.xi[i] - dec.xi[j]));
  dec.reconstruction_residual = verify;
  out.ok = true;
  return out;
}

inline bool same_structure(const PrincipalDecomposition& a, const PrincipalDecomposition& b,
                           double tol) {
  if (a.s != b.s || a.dims != b.dims) return false;
  for (int i = 0; i < a.s; ++i) {
    if (norm(a.xi[i] - b.xi[i]) > tol) return false;
    if (max_abs(a.projector(i) - b.projector(i)) > std::sqrt(tol)) return false;
  }
  return true;
}

inline Vecd random_combination(int r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Vecd c(static_cast<std::size_t>(r));
  for (auto& v : c) v = nd(rng);
  return c;
}

}  // namespace detail

/// Principal normals and eigendistributions at one point.
/// Throws FlatnessError if the shape operators do not commute and
/// GenericityError if five independent draws fail to give a consistent split.
inline PrincipalDecomposition principal_decomposition(const PointGeometry& pg,
                                                      double cluster_tol = kDefaultClusterTol,
                                                      std::uint64_t seed = 0x5eed) {
  const auto flat = flatness_test(pg);
  if (!flat.is_flat) {
    throw FlatnessError("principal_decomposition: shape operators do not commute (max " +
                        std::to_string(flat.max_commutator) + ")");
  }
  const int m = pg.m;
  const int r = pg.normal_rank;
  double amax = 0.0;
  for (const auto& a : pg.alpha) amax = std::max(amax, frobenius(a));
  const double scale = std::max(1.0, amax);

  PrincipalDecomposition dec;
  bool found = false;
  if (r == 0) {
    dec.s = 1;
    dec.xi.push_back({});
    dec.bases.push_back(Matd::identity(m));
    dec.dims.push_back(m);
    dec.gap = std::numeric_limits<double>::infinity();
    found = true;
  }
  for (int attempt = 0; attempt < 5 && !found; ++attempt) {
    const auto d1 = detail::decompose_once(pg, detail::random_combination(r, seed + 2 * attempt),
                                           scale, cluster_tol);
    const auto d2 = detail::decompose_once(
        pg, detail::random_combination(r, seed + 2 * attempt + 1), scale, cluster_tol);
    if (d1.ok && d2.ok && detail::same_structure(d1.dec, d2.dec, 1e-8 * scale)) {
      dec = d1.dec;
      found = true;
    }
  }
  if (!found) throw GenericityError("principal_decomposition: no consistent split in 5 draws");

  const double tn = norm(pg.T);
  if (tn > kTZeroTol) {
    for (int i = 0; i < dec.s; ++i) {
      if (norm(dec.component(i, pg.T)) >= (1.0 - 1e-6) * tn) dec.t_index = i;
    }
  }
  return dec;
}

inline PrincipalDecomposition principal_decomposition(const ParametricImmersion& f,
                                                      std::span<const double> u,
                                                      double cluster_tol = kDefaultClusterTol,
                                                      std::uint64_t seed = 0x5eed) {
  return principal_decomposition(point_geometry(f, u), cluster_tol, seed);
}

/// Smooth continuation of a pointwise decomposition near u: projectors
/// P_i(u') onto E_i(u') in moving-frame coordinates, principal normals as
/// ambient fields and sections of each E_i, all as order-1 jets.
/// Valid to first order, which is all a covariant derivative needs.
class DecompositionJets {
 public:
  DecompositionJets(const LocalGeometry& lg, const PrincipalDecomposition& dec)
      : lg_(&lg), dec_(&dec) {
    const int m = lg.dim();
    const int r = lg.normal_rank();
    const auto& A = lg.shape_jets();
    Mat<Jet> C(m, m);
    for (int b = 0; b < r; ++b) C = C + A[b] * dec.combination[b];
    // Eigenvalue of the generic combination on each block. The mean over a
    // block of V_i^T C V_i is exact to first order (constant multiplicity).
    std::vector<Jet> mu;
    for (int i = 0; i < dec.s; ++i) {
      const Matd& V = dec.bases[i];
      Jet t(0.0);
      for (int j = 0; j < V.cols(); ++j)
        for (int a = 0; a < m; ++a)
          for (int c = 0; c < m; ++c) t += V(a, j) * V(c, j) * C(a, c);
      mu.push_back(t / static_cast<double>(V.cols()));
    }
    for (int i = 0; i < dec.s; ++i) {
      Mat<Jet> P = Mat<Jet>::identity(m);
      for (int j = 0; j < dec.s; ++j) {
        if (j == i) continue;
        Mat<Jet> F = C;
        for (int a = 0; a < m; ++a) F(a, a) -= mu[j];
        P = P * F * recip(mu[i] - mu[j]);
      }
      proj_.push_back(P);
    }
    // xi_i^b = tr(P_i A_b) / d_i
    for (int i = 0; i < dec.s; ++i) {
      Vec<Jet> coords;
      for (int b = 0; b < r; ++b) {
        Jet t(0.0);
        for (int a = 0; a < m; ++a)
          for (int c = 0; c < m; ++c) t += proj_[i](a, c) * A[b](c, a);
        coords.push_back(t / static_cast<double>(dec.dims[i]));
      }
      xi_coords_.push_back(coords);
    }
    // T in moving-frame coordinates.
    const Vec<Jet> dt = lg.t_field();
    for (int a = 0; a < m; ++a) t_coords_.push_back(lg.space().inner(dt, lg.frames1().tangent[a]));
  }

  const Mat<Jet>& projector(int i) const { return proj_[i]; }

  /// xi_i as an ambient field.
  Vec<Jet> xi_field(int i) const {
    Vec<Jet> r = zeros<Jet>(lg_->space().dim());
    for (int b = 0; b < lg_->normal_rank(); ++b)
      axpy(r, xi_coords_[i][b], lg_->frames1().normal[b]);
    return r;
  }

  /// Section of E_i through y (frame coordinates at u): Y = P_i(u') y.
  Vec<Jet> section(int i, const Vecd& y) const { return project_section(proj_[i], y); }

  /// Projector onto span{T}.
  Mat<Jet> t_projector() const {
    const int m = lg_->dim();
    Jet n2(0.0);
    for (const auto& t : t_coords_) n2 += t * t;
    const Jet inv = recip(n2);
    Mat<Jet> P(m, m);
    for (int a = 0; a < m; ++a)
      for (int c = 0; c < m; ++c) P(a, c) = t_coords_[a] * t_coords_[c] * inv;
    return P;
  }

  Vec<Jet> project_section(const Mat<Jet>& P, const Vecd& y) const {
    const int m = lg_->dim();
    Vec<Jet> coeffs;
    for (int a = 0; a < m; ++a) {
      Jet t(0.0);
      for (int c = 0; c < m; ++c)
        if (y[c] != 0.0) t += P(a, c) * y[c];
      coeffs.push_back(t);
    }
    return lg_->tangent_field(coeffs);
  }

  const Vec<Jet>& t_coords() const { return t_coords_; }

 private:
  const LocalGeometry* lg_;
  const PrincipalDecomposition* dec_;
  std::vector<Mat<Jet>> proj_;
  std::vector<Vec<Jet>> xi_coords_;
  Vec<Jet> t_coords_;
};

}  // namespace prodgeo
