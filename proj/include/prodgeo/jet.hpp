#pragma once

// Truncated multivariate Taylor arithmetic ("jets") of order <= 3.
//
// A Jet of order k in m variables stores the Taylor coefficients
//   f(u0 + h) = sum_{|a| <= k} c_a h^a
// in graded monomial order: the constant term, then the m linear terms, then
// the m(m+1)/2 quadratic terms (i <= j), then the cubic terms (i <= j <= l).
// The index of a monomial does not depend on the order of the jet, so
// truncation is a prefix and mixed-order arithmetic is cheap.
//
// A jet with zero variables is a plain constant and broadcasts against any
// other jet. This lets the geometry code be written once over a generic
// scalar and instantiated with double or Jet.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prodgeo/errors.hpp"

namespace prodgeo {

inline constexpr int kMaxJetOrder = 3;
inline constexpr int kMaxJetVars = 8;

namespace detail {

struct MonomialLayout {
  int nvars = 0;
  std::array<int, kMaxJetOrder + 1> size_upto{};  // #monomials of degree <= k
  std::vector<std::array<std::uint8_t, kMaxJetVars>> exps;
  std::vector<int> degree;
  // Product table: (lhs, rhs, result) sorted by result degree.
  std::vector<std::array<int, 3>> mult;
  std::array<int, kMaxJetOrder + 1> mult_upto{};
  // partial[i]: (src, dst, factor) with dst degree sorted ascending.
  std::vector<std::vector<std::array<int, 3>>> partial;
  std::vector<std::array<int, kMaxJetOrder>> partial_upto;
  // Derivative weight a! for monomial a.
  std::vector<double> weight;
  // idx2[i*nvars+j], idx3[(i*nvars+j)*nvars+l]
  std::vector<int> idx2;
  std::vector<int> idx3;

  int index_of(const std::array<std::uint8_t, kMaxJetVars>& e) const {
    int deg = 0;
    std::array<int, 3> vars{};
    for (int v = 0; v < nvars; ++v) {
      for (int r = 0; r < e[v]; ++r) {
        if (deg < 3) vars[deg] = v;
        ++deg;
      }
    }
    switch (deg) {
      case 0:
        return 0;
      case 1:
        return 1 + vars[0];
      case 2:
        return idx2[vars[0] * nvars + vars[1]];
      case 3:
        return idx3[(vars[0] * nvars + vars[1]) * nvars + vars[2]];
      default:
        return -1;
    }
  }
};

inline MonomialLayout build_layout(int m) {
  MonomialLayout L;
  L.nvars = m;
  auto push = [&](std::array<std::uint8_t, kMaxJetVars> e, int deg) {
    L.exps.push_back(e);
    L.degree.push_back(deg);
  };
  push({}, 0);
  L.size_upto[0] = 1;
  for (int i = 0; i < m; ++i) {
    std::array<std::uint8_t, kMaxJetVars> e{};
    e[i] = 1;
    push(e, 1);
  }
  L.size_upto[1] = static_cast<int>(L.exps.size());
  L.idx2.assign(static_cast<std::size_t>(m * m), -1);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      std::array<std::uint8_t, kMaxJetVars> e{};
      ++e[i];
      ++e[j];
      const int id = static_cast<int>(L.exps.size());
      L.idx2[i * m + j] = L.idx2[j * m + i] = id;
      push(e, 2);
    }
  }
  L.size_upto[2] = static_cast<int>(L.exps.size());
  L.idx3.assign(static_cast<std::size_t>(m * m * m), -1);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      for (int l = j; l < m; ++l) {
        std::array<std::uint8_t, kMaxJetVars> e{};
        ++e[i];
        ++e[j];
        ++e[l];
        const int id = static_cast<int>(L.exps.size());
        const std::array<int, 3> p{i, j, l};
        // all permutations
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                 {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& q : perms) {
          L.idx3[(p[q[0]] * m + p[q[1]]) * m + p[q[2]]] = id;
        }
        push(e, 3);
      }
    }
  }
  L.size_upto[3] = static_cast<int>(L.exps.size());

  const int n = L.size_upto[3];
  L.weight.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    double w = 1.0;
    for (int v = 0; v < m; ++v) {
      for (int r = 2; r <= L.exps[a][v]; ++r) w *= r;
    }
    L.weight[a] = w;
  }

  for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (L.degree[a] + L.degree[b] != deg) continue;
        std::array<std::uint8_t, kMaxJetVars> e{};
        for (int v = 0; v < m; ++v) e[v] = L.exps[a][v] + L.exps[b][v];
        L.mult.push_back({a, b, L.index_of(e)});
      }
    }
    L.mult_upto[deg] = static_cast<int>(L.mult.size());
  }

  L.partial.resize(static_cast<std::size_t>(m));
  L.partial_upto.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int deg = 0; deg < kMaxJetOrder; ++deg) {
      for (int b = 0; b < n; ++b) {
        if (L.degree[b] != deg) continue;
        std::array<std::uint8_t, kMaxJetVars> e = L.exps[b];
        ++e[i];
        L.partial[i].push_back({L.index_of(e), b, e[i]});
      }
      L.partial_upto[i][deg] = static_cast<int>(L.partial[i].size());
    }
  }
  return L;
}

inline const MonomialLayout& layout(int m) {
  static const std::array<MonomialLayout, kMaxJetVars + 1> table = [] {
    std::array<MonomialLayout, kMaxJetVars + 1> t;
    for (int k = 0; k <= kMaxJetVars; ++k) t[k] = build_layout(k);
    return t;
  }();
  return table[m];
}

}  // namespace detail

/// Number of Taylor coefficients of a jet with the given shape.
inline int jet_size(int order, int nvars) {
  return detail::layout(nvars).size_upto[order];
}

class Jet {
 public:
  Jet() : coeffs_(1, 0.0) {}
  // Implicit on purpose: generic code writes S(0), x * 2.0, and so on.
  Jet(double v) : coeffs_(1, v) {}  // NOLINT(google-explicit-constructor)

  static Jet constant(double v, int order, int nvars) {
    check_shape(order, nvars);
    Jet j(order, nvars);
    j.coeffs_[0] = v;
    return j;
  }

  /// Seeds variable `index` at base value x0.
  static Jet variable(int index, double x0, int order, int nvars) {
    check_shape(order, nvars);
    if (order < 1 || index < 0 || index >= nvars) {
      throw DomainError("Jet::variable: index or order out of range");
    }
    Jet j(order, nvars);
    j.coeffs_[0] = x0;
    j.coeffs_[1 + index] = 1.0;
    return j;
  }

  /// Builds a jet from raw Taylor coefficients in graded order.
  static Jet from_coefficients(int order, int nvars, std::span<const double> c) {
    check_shape(order, nvars);
    Jet j(order, nvars);
    if (static_cast<int>(c.size()) != jet_size(order, nvars)) {
      throw DomainError("Jet::from_coefficients: wrong coefficient count");
    }
    j.coeffs_.assign(c.begin(), c.end());
    return j;
  }

  int order() const { return order_; }
  int nvars() const { return nvars_; }
  bool is_constant() const { return nvars_ == 0; }

  double value() const { return coeffs_[0]; }
  std::span<const double> coefficients() const { return coeffs_; }

  /// First partial derivative d f / d u_i at the base point.
  double d(int i) const {
    if (order_ < 1) return 0.0;
    return coeffs_[1 + i];
  }
  double d(int i, int j) const {
    if (order_ < 2) return 0.0;
    const auto& L = detail::layout(nvars_);
    const int id = L.idx2[i * nvars_ + j];
    return coeffs_[id] * L.weight[id];
  }
  double d(int i, int j, int l) const {
    if (order_ < 3) return 0.0;
    const auto& L = detail::layout(nvars_);
    const int id = L.idx3[(i * nvars_ + j) * nvars_ + l];
    return coeffs_[id] * L.weight[id];
  }

  /// Jet of order-1 representing the partial derivative d/du_i.
  Jet partial(int i) const {
    if (is_constant() || order_ == 0) return Jet(0.0);
    const auto& L = detail::layout(nvars_);
    Jet r(order_ - 1, nvars_);
    const int upto = L.partial_upto[i][order_ - 1];
    for (int t = 0; t < upto; ++t) {
      const auto& e = L.partial[i][t];
      r.coeffs_[e[1]] = e[2] * coeffs_[e[0]];
    }
    return r;
  }

  Jet truncated(int order) const {
    if (is_constant() || order >= order_) return *this;
    Jet r(order, nvars_);
    std::copy_n(coeffs_.begin(), r.coeffs_.size(), r.coeffs_.begin());
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  Jet& operator+=(const Jet& o) { return *this = add(*this, o, 1.0); }
  Jet& operator-=(const Jet& o) { return *this = add(*this, o, -1.0); }
  Jet& operator*=(const Jet& o) { return *this = mul(*this, o); }
  Jet& operator/=(const Jet& o) { return *this = mul(*this, recip(o)); }

  Jet& operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  friend Jet operator+(const Jet& a, const Jet& b) { return add(a, b, 1.0); }
  friend Jet operator-(const Jet& a, const Jet& b) { return add(a, b, -1.0); }
  friend Jet operator*(const Jet& a, const Jet& b) { return mul(a, b); }
  friend Jet operator/(const Jet& a, const Jet& b) { return mul(a, recip(b)); }
  friend Jet operator*(const Jet& a, double s) {
    Jet r = a;
    r *= s;
    return r;
  }
  friend Jet operator*(double s, const Jet& a) { return a * s; }
  friend Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.coeffs_[0] += s;
    return r;
  }
  friend Jet operator+(double s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
  friend Jet operator/(const Jet& a, double s) {
    if (s == 0.0) throw DomainError("Jet: division by zero constant");
    return a * (1.0 / s);
  }

  friend Jet recip(const Jet& a) {
    const double v = a.value();
    if (v == 0.0) throw DomainError("Jet: reciprocal of a zero-valued jet");
    const double r = 1.0 / v;
    return compose(a, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
  }
  friend Jet sqrt(const Jet& a) {
    const double v = a.value();
    if (!(v > 0.0)) throw DomainError("Jet: sqrt of a non-positive jet");
    const double s = std::sqrt(v);
    return compose(a, s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v));
  }
  friend Jet sin(const Jet& a) {
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    return compose(a, s, c, -s, -c);
  }
  friend Jet cos(const Jet& a) {
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    return compose(a, c, -s, -c, s);
  }
  friend Jet exp(const Jet& a) {
    const double e = std::exp(a.value());
    return compose(a, e, e, e, e);
  }
  friend Jet log(const Jet& a) {
    const double v = a.value();
    if (!(v > 0.0)) throw DomainError("Jet: log of a non-positive jet");
    const double r = 1.0 / v;
    return compose(a, std::log(v), r, -r * r, 2.0 * r * r * r);
  }
  friend Jet sinh(const Jet& a) {
    const double s = std::sinh(a.value());
    const double c = std::cosh(a.value());
    return compose(a, s, c, s, c);
  }
  friend Jet cosh(const Jet& a) {
    const double s = std::sinh(a.value());
    const double c = std::cosh(a.value());
    return compose(a, c, s, c, s);
  }

  /// g(a) from the derivatives g(v), g'(v), g''(v), g'''(v) at v = value(a).
  static Jet compose(const Jet& a, double g0, double g1, double g2, double g3) {
    if (a.is_constant() || a.order_ == 0) return Jet(g0);
    Jet delta = a;
    delta.coeffs_[0] = 0.0;
    Jet r = delta * g1;
    r.coeffs_[0] = g0;
    if (a.order_ >= 2) {
      const Jet d2 = delta * delta;
      r = add(r, d2, 0.5 * g2);
      if (a.order_ >= 3) r = add(r, d2 * delta, g3 / 6.0);
    }
    return r;
  }

 private:
  Jet(int order, int nvars)
      : order_(order),
        nvars_(nvars),
        coeffs_(static_cast<std::size_t>(jet_size(order, nvars)), 0.0) {}

  static void check_shape(int order, int nvars) {
    if (order < 0 || order > kMaxJetOrder || nvars < 0 || nvars > kMaxJetVars) {
      throw DomainError("Jet: order must be <= 3 and num_vars <= 8");
    }
  }

  static void check_compatible(const Jet& a, const Jet& b) {
    if (a.nvars_ != b.nvars_) {
      throw DomainError("Jet: mismatched number of variables (" +
                        std::to_string(a.nvars_) + " vs " +
                        std::to_string(b.nvars_) + ")");
    }
  }

  // a + s * b
  static Jet add(const Jet& a, const Jet& b, double s) {
    if (b.is_constant()) {
      Jet r = a;
      r.coeffs_[0] += s * b.coeffs_[0];
      return r;
    }
    if (a.is_constant()) {
      Jet r = b * s;
      r.coeffs_[0] += a.coeffs_[0];
      return r;
    }
    check_compatible(a, b);
    const int order = std::min(a.order_, b.order_);
    Jet r(order, a.nvars_);
    for (std::size_t k = 0; k < r.coeffs_.size(); ++k) {
      r.coeffs_[k] = a.coeffs_[k] + s * b.coeffs_[k];
    }
    return r;
  }

  static Jet mul(const Jet& a, const Jet& b) {
    if (b.is_constant()) return a * b.coeffs_[0];
    if (a.is_constant()) return b * a.coeffs_[0];
    check_compatible(a, b);
    const int order = std::min(a.order_, b.order_);
    const auto& L = detail::layout(a.nvars_);
    Jet r(order, a.nvars_);
    const int upto = L.mult_upto[order];
    const double* pa = a.coeffs_.data();
    const double* pb = b.coeffs_.data();
    double* pr = r.coeffs_.data();
    for (int t = 0; t < upto; ++t) {
      const auto& e = L.mult[t];
      pr[e[2]] += pa[e[0]] * pb[e[1]];
    }
    return r;
  }

  int order_ = 0;
  int nvars_ = 0;
  std::vector<double> coeffs_;
};

// Scalar helpers shared by double and Jet so generic code can call them
// unqualified.
inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

inline double recip(double x) {
  if (x == 0.0) throw DomainError("reciprocal of zero");
  return 1.0 / x;
}
inline double sqrt(double x) { return std::sqrt(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sinh(double x) { return std::sinh(x); }
inline double cosh(double x) { return std::cosh(x); }

/// Checked square root: throws DomainError for non-positive input, for
/// either scalar type.
template <class S>
S checked_sqrt(const S& x) {
  if (!(value_of(x) > 0.0)) throw DomainError("sqrt of a non-positive value");
  return sqrt(x);
}

enum class JetOp { add, sub, mul, div, sqrt, sin, cos, exp, recip };

/// Applies `op` to a (and b for the binary operations).
inline Jet jet_arithmetic(const Jet& a, const Jet& b, JetOp op) {
  switch (op) {
    case JetOp::add:
      return a + b;
    case JetOp::sub:
      return a - b;
    case JetOp::mul:
      return a * b;
    case JetOp::div:
      return a / b;
    case JetOp::sqrt:
      return sqrt(a);
    case JetOp::sin:
      return sin(a);
    case JetOp::cos:
      return cos(a);
    case JetOp::exp:
      return exp(a);
    case JetOp::recip:
      return recip(a);
  }
  return a;
}

/// Seeds all m variables of a point u at the given order.
inline std::vector<Jet> seed_variables(std::span<const double> u, int order) {
  const int m = static_cast<int>(u.size());
  std::vector<Jet> x;
  x.reserve(u.size());
  for (int i = 0; i < m; ++i) x.push_back(Jet::variable(i, u[i], order, m));
  return x;
}

}  // namespace prodgeo
