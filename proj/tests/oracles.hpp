#pragma once

// Brute-force reference computations for the tests. Everything here works
// from point evaluations of f alone (5-point central differences, nested
// where needed) and dense Eigen algebra, so it shares no code with the jet
// pipeline it is compared against.

#include <Eigen/Dense>
#include <vector>

#include "prodgeo/immersion.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd container_metric(const prodgeo::AmbientSpace& s) {
  MatrixXd g = MatrixXd::Identity(s.dim(), s.dim());
  if (s.epsilon() < 0) g(0, 0) = -1.0;
  return g;
}

inline VectorXd eval(const prodgeo::ParametricImmersion& f, const std::vector<double>& u) {
  const auto p = f(std::span<const double>(u));
  return Eigen::Map<const VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
}

/// 5-point central difference of a vector-valued function of u along k.
template <class F>
auto diff5(F&& fn, std::vector<double> u, int k, double h) {
  const double u0 = u[k];
  u[k] = u0 + 2 * h;
  auto a = fn(u);
  u[k] = u0 + h;
  auto b = fn(u);
  u[k] = u0 - h;
  auto c = fn(u);
  u[k] = u0 - 2 * h;
  auto d = fn(u);
  return decltype(a)((-a + 8.0 * b - 8.0 * c + d) / (12.0 * h));
}

inline MatrixXd jacobian(const prodgeo::ParametricImmersion& f, const std::vector<double>& u,
                         double h = 1e-3) {
  const int m = f.dim();
  MatrixXd J(f.space().dim(), m);
  for (int k = 0; k < m; ++k)
    J.col(k) = diff5([&](const std::vector<double>& v) { return eval(f, v); }, u, k, h);
  return J;
}

inline MatrixXd metric(const prodgeo::ParametricImmersion& f, const std::vector<double>& u) {
  const MatrixXd J = jacobian(f, u);
  return J.transpose() * container_metric(f.space()) * J;
}

/// d^2 f / du_i du_j by differentiating the Jacobian column.
inline VectorXd hessian(const prodgeo::ParametricImmersion& f, const std::vector<double>& u, int i,
                        int j, double h = 1e-3) {
  return diff5([&](const std::vector<double>& v) { return VectorXd(jacobian(f, v, h).col(i)); }, u, j, h);
}

/// Component of v tangent to f (orthogonal projection in the container metric).
inline VectorXd tangential(const prodgeo::ParametricImmersion& f, const std::vector<double>& u,
                           const VectorXd& v) {
  const MatrixXd G = container_metric(f.space());
  const MatrixXd J = jacobian(f, u);
  const MatrixXd g = J.transpose() * G * J;
  return J * g.ldlt().solve(J.transpose() * G * v);
}

/// Second fundamental form of i o f in the flat container.
inline VectorXd alpha_container(const prodgeo::ParametricImmersion& f, const std::vector<double>& u,
                                int i, int j) {
  const VectorXd h = hessian(f, u, i, j);
  return h - tangential(f, u, h);
}

/// Second fundamental form of f in Q x R: also drop the component along
/// the inclusion normal (p_Q, 0).
inline VectorXd alpha_product(const prodgeo::ParametricImmersion& f, const std::vector<double>& u,
                              int i, int j) {
  const MatrixXd G = container_metric(f.space());
  VectorXd nbar = eval(f, u);
  nbar(nbar.size() - 1) = 0.0;
  const VectorXd a = alpha_container(f, u, i, j);
  return a - (nbar.dot(G * a) / nbar.dot(G * nbar)) * nbar;
}

/// Christoffel symbols Gamma^l_ij, stored [l][i * m + j], from a metric
/// that is itself differenced.
inline std::vector<VectorXd> christoffel(const prodgeo::ParametricImmersion& f,
                                         const std::vector<double>& u, double H) {
  const int m = f.dim();
  std::vector<MatrixXd> dg;
  for (int k = 0; k < m; ++k)
    dg.push_back(diff5([&](const std::vector<double>& v) { return metric(f, v); }, u, k, H));
  const MatrixXd ginv = metric(f, u).inverse();
  std::vector<VectorXd> G(static_cast<std::size_t>(m), VectorXd::Zero(m * m));
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int p = 0; p < m; ++p) s += ginv(l, p) * (dg[i](j, p) + dg[j](i, p) - dg[p](i, j));
        G[l](i * m + j) = 0.5 * s;
      }
  return G;
}

/// Coordinate Ricci tensor Ric_bc = sum_a [R(d_a, d_b) d_c]^a with
/// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
inline MatrixXd ricci_coord(const prodgeo::ParametricImmersion& f, const std::vector<double>& u,
                            double H = 1e-2) {
  const int m = f.dim();
  auto flat = [&](const std::vector<double>& v) {
    const auto G = christoffel(f, v, H);
    VectorXd out(m * m * m);
    for (int l = 0; l < m; ++l) out.segment(l * m * m, m * m) = G[l];
    return out;
  };
  std::vector<VectorXd> dG;
  for (int a = 0; a < m; ++a) dG.push_back(diff5(flat, u, a, H));
  const VectorXd G0 = flat(u);
  auto gam = [&](int l, int i, int j) { return G0((l * m + i) * m + j); };
  auto dgam = [&](int a, int l, int i, int j) { return dG[a]((l * m + i) * m + j); };
  MatrixXd ric = MatrixXd::Zero(m, m);
  for (int b = 0; b < m; ++b)
    for (int c = 0; c < m; ++c) {
      double s = 0.0;
      for (int a = 0; a < m; ++a) {
        s += dgam(a, a, b, c) - dgam(b, a, a, c);
        for (int p = 0; p < m; ++p) s += gam(p, b, c) * gam(a, a, p) - gam(p, a, c) * gam(a, b, p);
      }
      ric(b, c) = s;
    }
  return 0.5 * (ric + ric.transpose());
}

/// Eigenvalues of g^{-1} B for a symmetric bilinear form B in coordinates,
/// ascending. Gauge-free way to compare with frame quantities.
inline VectorXd metric_eigenvalues(const MatrixXd& g, const MatrixXd& B) {
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(B, g);
  return es.eigenvalues();
}

}  // namespace oracle
