#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prodgeo/ambient.hpp"
#include "prodgeo/derivatives.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/jet.hpp"

namespace prodgeo {

/// Closed-form facts known about a catalog immersion. Unset fields are
/// unknown and are not checked.
struct ExpectedAnalytics {
  std::optional<double> einstein_constant;
  std::optional<int> num_principal;
  std::vector<int> dims;             // multiplicities, sorted ascending
  std::vector<double> xi_norms;      // ||xi_i||, sorted ascending
  std::optional<bool> class_a;
  std::optional<bool> einstein;
  std::optional<bool> minimal;
  std::optional<bool> flat_normal;
};

/// An immersion u -> f(u) in Q^n_eps x R, given on a rectangular chart.
/// The map is provided twice, over reals and over jets, from one generic
/// callable (see make_immersion). Immutable once built.
class ParametricImmersion {
 public:
  ParametricImmersion(std::string name, AmbientSpace space, Chart chart, RealMap eval_real,
                      JetMap eval_jet, ExpectedAnalytics expected = {})
      : name_(std::move(name)),
        space_(space),
        chart_(std::move(chart)),
        eval_real_(std::move(eval_real)),
        eval_jet_(std::move(eval_jet)),
        expected_(std::move(expected)) {
    if (chart_.dim() < 1 || chart_.dim() > kMaxJetVars) {
      throw SpecMismatchError("immersion: chart dimension must lie in [1, 8]");
    }
    for (int i = 0; i < chart_.dim(); ++i) {
      if (!(chart_.lower[i] < chart_.upper[i])) {
        throw SpecMismatchError("immersion: empty chart interval");
      }
    }
  }

  const std::string& name() const { return name_; }
  const AmbientSpace& space() const { return space_; }
  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  const ExpectedAnalytics& expected() const { return expected_; }

  AmbientPoint operator()(std::span<const double> u) const { return eval_real_(u); }
  Vec<Jet> operator()(std::span<const Jet> u) const { return eval_jet_(u); }

  const RealMap& real_map() const { return eval_real_; }
  const JetMap& jet_map() const { return eval_jet_; }

  /// Evaluates the map as jets of the given order seeded at u.
  Vec<Jet> jets(std::span<const double> u, int order) const {
    if (!chart_.contains(u)) throw DomainError("immersion: parameter outside the chart");
    const auto x = seed_variables(u, order);
    Vec<Jet> y = eval_jet_(x);
    if (static_cast<int>(y.size()) != space_.dim()) {
      throw SpecMismatchError("immersion '" + name_ + "' returns " +
                              std::to_string(y.size()) + " coordinates, expected " +
                              std::to_string(space_.dim()));
    }
    return y;
  }

  ParametricImmersion with_expected(ExpectedAnalytics e) const {
    ParametricImmersion r = *this;
    r.expected_ = std::move(e);
    return r;
  }

 private:
  std::string name_;
  AmbientSpace space_;
  Chart chart_;
  RealMap eval_real_;
  JetMap eval_jet_;
  ExpectedAnalytics expected_;
};

/// Wraps a generic callable `f(const Vec<S>& u) -> Vec<S>` as an immersion.
template <class F>
ParametricImmersion make_immersion(std::string name, AmbientSpace space, Chart chart, F f,
                                   ExpectedAnalytics expected = {}) {
  RealMap real = [f](std::span<const double> u) {
    return f(Vecd(u.begin(), u.end()));
  };
  JetMap jet = [f](std::span<const Jet> u) { return f(Vec<Jet>(u.begin(), u.end())); };
  return ParametricImmersion(std::move(name), space, std::move(chart), std::move(real),
                             std::move(jet), std::move(expected));
}

/// Gnomonic chart of the unit sphere: x -> (1, x) / sqrt(1 + eps |x|^2).
/// For eps = -1 this is the Klein chart of the hyperboloid (|x| < 1).
template <class S>
Vec<S> gnomonic_point(const Vec<S>& x, int epsilon = 1) {
  S r2(1.0);
  for (const auto& v : x) r2 += static_cast<double>(epsilon) * v * v;
  const S inv = recip(checked_sqrt(r2));
  Vec<S> p;
  p.reserve(x.size() + 1);
  p.push_back(inv);
  for (const auto& v : x) p.push_back(v * inv);
  return p;
}

}  // namespace prodgeo
