#pragma once

// Derivative tensors of vector-valued maps, computed either exactly by jet
// propagation or by central finite differences with Richardson
// extrapolation (the independent oracle).

#include <algorithm>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "prodgeo/errors.hpp"
#include "prodgeo/jet.hpp"
#include "prodgeo/linalg.hpp"

namespace prodgeo {

using RealMap = std::function<Vecd(std::span<const double>)>;
using JetMap = std::function<Vec<Jet>(std::span<const Jet>)>;

/// Rectangular parameter domain.
struct Chart {
  Vecd lower;
  Vecd upper;

  int dim() const { return static_cast<int>(lower.size()); }

  double distance_to_boundary(std::span<const double> u) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim(); ++i) {
      d = std::min({d, u[i] - lower[i], upper[i] - u[i]});
    }
    return d;
  }

  bool contains(std::span<const double> u) const {
    return static_cast<int>(u.size()) == dim() && distance_to_boundary(u) >= 0.0;
  }
};

/// Value, Jacobian, Hessian and third derivatives of a map R^m -> R^d.
/// Blocks of order 2 and 3 are symmetric in the parameter indices.
class DerivativeTensor {
 public:
  DerivativeTensor() = default;
  DerivativeTensor(int target_dim, int num_vars, int order)
      : d_(target_dim),
        m_(num_vars),
        order_(order),
        value_(static_cast<std::size_t>(d_), 0.0),
        jac_(static_cast<std::size_t>(d_ * m_), 0.0),
        hess_(static_cast<std::size_t>(order >= 2 ? d_ * m_ * m_ : 0), 0.0),
        third_(static_cast<std::size_t>(order >= 3 ? d_ * m_ * m_ * m_ : 0), 0.0) {}

  int target_dim() const { return d_; }
  int num_vars() const { return m_; }
  int order() const { return order_; }

  double& value(int c) { return value_[c]; }
  double value(int c) const { return value_[c]; }
  double& d(int c, int i) { return jac_[c * m_ + i]; }
  double d(int c, int i) const { return jac_[c * m_ + i]; }
  double& d(int c, int i, int j) { return hess_[(c * m_ + i) * m_ + j]; }
  double d(int c, int i, int j) const { return hess_[(c * m_ + i) * m_ + j]; }
  double& d(int c, int i, int j, int k) { return third_[((c * m_ + i) * m_ + j) * m_ + k]; }
  double d(int c, int i, int j, int k) const {
    return third_[((c * m_ + i) * m_ + j) * m_ + k];
  }

  const Vecd& values() const { return value_; }

  /// Largest absolute difference per block: {value, order 1, order 2, order 3}.
  std::array<double, 4> max_difference(const DerivativeTensor& o) const {
    auto diff = [](const Vecd& a, const Vecd& b) {
      double r = 0.0;
      for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
        r = std::max(r, std::abs(a[k] - b[k]));
      return r;
    };
    return {diff(value_, o.value_), diff(jac_, o.jac_), diff(hess_, o.hess_),
            diff(third_, o.third_)};
  }

  /// Taylor jets of each component, of this tensor's order.
  Vec<Jet> to_jets() const {
    const auto& L = detail::layout(m_);
    const int size = jet_size(order_, m_);
    Vec<Jet> r;
    r.reserve(static_cast<std::size_t>(d_));
    Vecd c(static_cast<std::size_t>(size));
    for (int comp = 0; comp < d_; ++comp) {
      for (int a = 0; a < size; ++a) {
        std::array<int, 3> vars{};
        int deg = 0;
        for (int v = 0; v < m_; ++v)
          for (int t = 0; t < L.exps[a][v]; ++t) vars[deg++] = v;
        double deriv = 0.0;
        switch (deg) {
          case 0:
            deriv = value(comp);
            break;
          case 1:
            deriv = d(comp, vars[0]);
            break;
          case 2:
            deriv = d(comp, vars[0], vars[1]);
            break;
          default:
            deriv = d(comp, vars[0], vars[1], vars[2]);
        }
        c[a] = deriv / L.weight[a];
      }
      r.push_back(Jet::from_coefficients(order_, m_, c));
    }
    return r;
  }

 private:
  int d_ = 0;
  int m_ = 0;
  int order_ = 0;
  Vecd value_;
  Vecd jac_;
  Vecd hess_;
  Vecd third_;
};

/// Extracts a DerivativeTensor from jets that all share (order, nvars).
inline DerivativeTensor tensor_from_jets(const Vec<Jet>& comps, int num_vars, int order) {
  DerivativeTensor t(static_cast<int>(comps.size()), num_vars, order);
  for (int c = 0; c < t.target_dim(); ++c) {
    const Jet& j = comps[c];
    t.value(c) = j.value();
    for (int i = 0; i < num_vars; ++i) {
      t.d(c, i) = j.d(i);
      if (order < 2) continue;
      for (int k = 0; k < num_vars; ++k) {
        t.d(c, i, k) = j.d(i, k);
        if (order < 3) continue;
        for (int l = 0; l < num_vars; ++l) t.d(c, i, k, l) = j.d(i, k, l);
      }
    }
  }
  return t;
}

/// Exact derivatives of `f` at `u` by seeding the parameters as jets.
inline DerivativeTensor evaluate_map_derivatives(const JetMap& f,
                                                 std::span<const double> u, int order) {
  if (order < 1 || order > kMaxJetOrder) {
    throw DomainError("evaluate_map_derivatives: order must be 1, 2 or 3");
  }
  const auto x = seed_variables(u, order);
  const Vec<Jet> y = f(x);
  return tensor_from_jets(y, static_cast<int>(u.size()), order);
}

/// Central differences with one level of Richardson extrapolation.
/// Error is O(step^4) for orders 1-2 and O(step^2) for order 3.
/// With a chart, the stencil (reach 2*step) must stay 4*step inside it.
inline DerivativeTensor finite_difference_oracle(const RealMap& f,
                                                 std::span<const double> u, int order,
                                                 double step, const Chart* chart = nullptr) {
  if (order < 1 || order > 3) throw DomainError("finite_difference_oracle: bad order");
  if (!(step > 0.0)) throw DomainError("finite_difference_oracle: step must be positive");
  if (chart != nullptr && chart->distance_to_boundary(u) < 4.0 * step) {
    throw DomainError("finite_difference_oracle: stencil leaves the chart");
  }
  const int m = static_cast<int>(u.size());
  Vecd base(u.begin(), u.end());
  auto eval_at = [&](const Vecd& x) { return f(std::span<const double>(x)); };
  const Vecd f0 = eval_at(base);
  const int d = static_cast<int>(f0.size());
  DerivativeTensor t(d, m, order);
  for (int c = 0; c < d; ++c) t.value(c) = f0[c];

  auto shifted = [&](const Vecd& x, int i, double h) {
    Vecd y = x;
    y[i] += h;
    return y;
  };

  // First derivatives.
  auto first = [&](const Vecd& x, int i, double h) {
    const Vecd p = eval_at(shifted(x, i, h));
    const Vecd q = eval_at(shifted(x, i, -h));
    Vecd r(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) r[c] = (p[c] - q[c]) / (2.0 * h);
    return r;
  };
  // Second derivatives at x (Richardson-extrapolated), all components.
  auto second_raw = [&](const Vecd& x, const Vecd& fx, int i, int j, double h) {
    Vecd r(static_cast<std::size_t>(d));
    if (i == j) {
      const Vecd p = eval_at(shifted(x, i, h));
      const Vecd q = eval_at(shifted(x, i, -h));
      for (int c = 0; c < d; ++c) r[c] = (p[c] - 2.0 * fx[c] + q[c]) / (h * h);
    } else {
      const Vecd pp = eval_at(shifted(shifted(x, i, h), j, h));
      const Vecd pm = eval_at(shifted(shifted(x, i, h), j, -h));
      const Vecd mp = eval_at(shifted(shifted(x, i, -h), j, h));
      const Vecd mm = eval_at(shifted(shifted(x, i, -h), j, -h));
      for (int c = 0; c < d; ++c) r[c] = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h);
    }
    return r;
  };
  auto second = [&](const Vecd& x, const Vecd& fx, int i, int j, double h) {
    const Vecd coarse = second_raw(x, fx, i, j, h);
    const Vecd fine = second_raw(x, fx, i, j, 0.5 * h);
    Vecd r(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) r[c] = (4.0 * fine[c] - coarse[c]) / 3.0;
    return r;
  };

  for (int i = 0; i < m; ++i) {
    const Vecd coarse = first(base, i, step);
    const Vecd fine = first(base, i, 0.5 * step);
    for (int c = 0; c < d; ++c) t.d(c, i) = (4.0 * fine[c] - coarse[c]) / 3.0;
  }
  if (order >= 2) {
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        const Vecd s = second(base, f0, i, j, step);
        for (int c = 0; c < d; ++c) t.d(c, i, j) = t.d(c, j, i) = s[c];
      }
  }
  if (order >= 3) {
    // d_k of the extrapolated second derivative, then symmetrized.
    std::vector<Vecd> raw(static_cast<std::size_t>(m * m * m));
    for (int k = 0; k < m; ++k) {
      const Vecd xp = shifted(base, k, step);
      const Vecd xm = shifted(base, k, -step);
      const Vecd fp = eval_at(xp);
      const Vecd fm = eval_at(xm);
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          const Vecd sp = second(xp, fp, i, j, step);
          const Vecd sm = second(xm, fm, i, j, step);
          Vecd r(static_cast<std::size_t>(d));
          for (int c = 0; c < d; ++c) r[c] = (sp[c] - sm[c]) / (2.0 * step);
          raw[(i * m + j) * m + k] = r;
          raw[(j * m + i) * m + k] = r;
        }
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int c = 0; c < d; ++c) {
            t.d(c, i, j, k) = (raw[(i * m + j) * m + k][c] + raw[(j * m + k) * m + i][c] +
                               raw[(k * m + i) * m + j][c]) /
                              3.0;
          }
  }
  return t;
}

}  // namespace prodgeo
