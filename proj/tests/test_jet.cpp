#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "prodgeo/derivatives.hpp"
#include "prodgeo/jet.hpp"

using namespace prodgeo;

namespace {

Jet random_jet(std::mt19937_64& rng, int order, int nvars) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(jet_size(order, nvars)));
  for (auto& x : c) x = d(rng);
  c[0] = 1.5 + 0.5 * c[0];  // keep away from zero for recip/sqrt
  return Jet::from_coefficients(order, nvars, c);
}

double max_coeff_diff(const Jet& a, const Jet& b) {
  double r = 0.0;
  const auto ca = a.coefficients();
  const auto cb = b.coefficients();
  EXPECT_EQ(ca.size(), cb.size());
  for (std::size_t i = 0; i < ca.size(); ++i) r = std::max(r, std::abs(ca[i] - cb[i]));
  return r;
}

}  // namespace

TEST(Jet, ProductOfVariablesHasExactDerivatives) {
  // f = x^2 y at (1.5, -0.5)
  const auto v = seed_variables(std::vector<double>{1.5, -0.5}, 3);
  const Jet f = v[0] * v[0] * v[1];
  EXPECT_DOUBLE_EQ(f.value(), 1.5 * 1.5 * -0.5);
  EXPECT_DOUBLE_EQ(f.d(0), 2 * 1.5 * -0.5);
  EXPECT_DOUBLE_EQ(f.d(1), 1.5 * 1.5);
  EXPECT_DOUBLE_EQ(f.d(0, 0), 2 * -0.5);
  EXPECT_DOUBLE_EQ(f.d(0, 1), 2 * 1.5);
  EXPECT_DOUBLE_EQ(f.d(1, 0), 2 * 1.5);
  EXPECT_DOUBLE_EQ(f.d(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(f.d(0, 0, 1), 2.0);
  EXPECT_DOUBLE_EQ(f.d(1, 0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.d(0, 0, 0), 0.0);
}

TEST(Jet, ElementaryFunctionsMatchClosedForms) {
  const double x0 = 0.7;
  const Jet x = Jet::variable(0, x0, 3, 1);
  const Jet s = sin(x);
  EXPECT_NEAR(s.d(0), std::cos(x0), 1e-15);
  EXPECT_NEAR(s.d(0, 0), -std::sin(x0), 1e-15);
  EXPECT_NEAR(s.d(0, 0, 0), -std::cos(x0), 1e-15);
  const Jet r = recip(x);
  EXPECT_NEAR(r.d(0, 0, 0), -6.0 / std::pow(x0, 4), 1e-12);
  const Jet q = sqrt(x);
  EXPECT_NEAR(q.d(0, 0), -0.25 * std::pow(x0, -1.5), 1e-14);
  const Jet e = exp(2.0 * x);
  EXPECT_NEAR(e.d(0, 0, 0), 8.0 * std::exp(2 * x0), 1e-12);
  const Jet l = log(x);
  EXPECT_NEAR(l.d(0, 0, 0), 2.0 / (x0 * x0 * x0), 1e-12);
  EXPECT_NEAR(cosh(x).d(0), std::sinh(x0), 1e-15);
  EXPECT_NEAR(sinh(x).d(0, 0), std::sinh(x0), 1e-15);
}

TEST(Jet, RingAxiomsHoldCoefficientwise) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int nv = 1 + trial % 4;
    const Jet a = random_jet(rng, 3, nv), b = random_jet(rng, 3, nv), c = random_jet(rng, 3, nv);
    EXPECT_LT(max_coeff_diff(a * b, b * a), 1e-14);
    EXPECT_LT(max_coeff_diff(a + b, b + a), 1e-15);
    EXPECT_LT(max_coeff_diff((a * b) * c, a * (b * c)), 1e-13);
    EXPECT_LT(max_coeff_diff(a * (b + c), a * b + a * c), 1e-13);
    EXPECT_LT(max_coeff_diff(a * recip(a), Jet::constant(1.0, 3, nv)), 1e-13);
    EXPECT_LT(max_coeff_diff(sqrt(a) * sqrt(a), a), 1e-13);
    EXPECT_LT(max_coeff_diff(exp(log(a)), a), 1e-12);
  }
}

TEST(Jet, ChainRuleAgainstHandDerivatives) {
  // g(x, y) = sin(x y) at (0.3, 1.1)
  const double x0 = 0.3, y0 = 1.1;
  const auto v = seed_variables(std::vector<double>{x0, y0}, 3);
  const Jet g = sin(v[0] * v[1]);
  const double p = x0 * y0;
  EXPECT_NEAR(g.d(0), y0 * std::cos(p), 1e-15);
  EXPECT_NEAR(g.d(0, 1), std::cos(p) - p * std::sin(p), 1e-15);
  EXPECT_NEAR(g.d(0, 0), -y0 * y0 * std::sin(p), 1e-15);
  // d^3/dx^2 dy = -2 y sin(p) - x y^2 cos(p)
  EXPECT_NEAR(g.d(0, 0, 1), -2 * y0 * std::sin(p) - x0 * y0 * y0 * std::cos(p), 1e-14);
  EXPECT_NEAR(g.d(1, 1, 1), -x0 * x0 * x0 * std::cos(p), 1e-15);
}

TEST(Jet, PartialLowersOrderAndCommutes) {
  std::mt19937_64 rng(3);
  const Jet a = random_jet(rng, 3, 3);
  const Jet dx = a.partial(0);
  EXPECT_EQ(dx.order(), 2);
  EXPECT_DOUBLE_EQ(dx.value(), a.d(0));
  EXPECT_DOUBLE_EQ(dx.d(1), a.d(0, 1));
  EXPECT_DOUBLE_EQ(dx.d(1, 2), a.d(0, 1, 2));
  EXPECT_LT(max_coeff_diff(a.partial(0).partial(2), a.partial(2).partial(0)), 1e-15);
  EXPECT_EQ(a.partial(1).partial(1).partial(1).order(), 0);
}

TEST(Jet, TruncationIsAPrefixAndMixedOrdersUseTheMinimum) {
  std::mt19937_64 rng(5);
  const Jet a = random_jet(rng, 3, 2);
  const Jet b = random_jet(rng, 3, 2);
  const Jet a1 = a.truncated(1);
  EXPECT_EQ(a1.order(), 1);
  const Jet p = a1 * b;
  EXPECT_EQ(p.order(), 1);
  EXPECT_LT(max_coeff_diff(p, (a * b).truncated(1)), 1e-15);
}

TEST(Jet, ConstantsBroadcast) {
  const Jet x = Jet::variable(1, 2.0, 2, 3);
  const Jet c(4.0);
  const Jet s = x * c + 1.0;
  EXPECT_DOUBLE_EQ(s.value(), 9.0);
  EXPECT_DOUBLE_EQ(s.d(1), 4.0);
  EXPECT_DOUBLE_EQ(s.d(0), 0.0);
}

TEST(Jet, DomainErrors) {
  const Jet z = Jet::variable(0, 0.0, 2, 1);
  EXPECT_THROW(recip(z), DomainError);
  EXPECT_THROW(sqrt(z), DomainError);
  EXPECT_THROW(log(z - 1.0), DomainError);
  EXPECT_THROW(Jet::variable(0, 0.0, 4, 1), DomainError);
  EXPECT_THROW(Jet::variable(0, 0.0, 2, 9), DomainError);
  EXPECT_THROW(Jet::variable(2, 0.0, 2, 2), DomainError);
}

TEST(Jet, IncompatibleShapesAreRejected) {
  const Jet a = Jet::variable(0, 1.0, 2, 2);
  const Jet b = Jet::variable(0, 1.0, 2, 3);
  EXPECT_THROW(a + b, DomainError);
}

TEST(Jet, ArithmeticDispatch) {
  const Jet a = Jet::variable(0, 0.4, 2, 1);
  const Jet b = Jet::variable(0, 0.9, 2, 1);
  EXPECT_DOUBLE_EQ(jet_arithmetic(a, b, JetOp::div).value(), 0.4 / 0.9);
  EXPECT_DOUBLE_EQ(jet_arithmetic(a, b, JetOp::cos).value(), std::cos(0.4));
}

// ---------------------------------------------------------------------------
// Jets against the finite-difference oracle
// ---------------------------------------------------------------------------

namespace {

template <class S>
Vec<S> sample_map(std::span<const S> u) {
  using prodgeo::cos, prodgeo::exp, prodgeo::sin, prodgeo::sqrt;
  const S& x = u[0];
  const S& y = u[1];
  const S& z = u[2];
  return {sin(x * y) + z * z * z, exp(x - z) * cos(y), sqrt(1.0 + x * x + y * y) * z};
}

}  // namespace

TEST(Derivatives, JetsAgreeWithFiniteDifferences) {
  const std::vector<double> u{0.2, -0.4, 0.5};
  const RealMap fr = [](std::span<const double> v) { return sample_map<double>(v); };
  const JetMap fj = [](std::span<const Jet> v) { return sample_map<Jet>(v); };
  const auto exact = evaluate_map_derivatives(fj, u, 3);
  const auto fd = finite_difference_oracle(fr, u, 3, 1e-3);
  const auto diff = exact.max_difference(fd);
  EXPECT_LT(diff[0], 1e-15);
  EXPECT_LT(diff[1], 1e-10);
  EXPECT_LT(diff[2], 1e-8);
  EXPECT_LT(diff[3], 1e-5);
}

TEST(Derivatives, FiniteDifferenceErrorShrinksWithStep) {
  // Truncation regime: the order-1 and order-2 errors fall as the step
  // shrinks from 1e-1 to 1e-2.
  const std::vector<double> u{0.2, -0.4, 0.5};
  const RealMap fr = [](std::span<const double> v) { return sample_map<double>(v); };
  const JetMap fj = [](std::span<const Jet> v) { return sample_map<Jet>(v); };
  const auto exact = evaluate_map_derivatives(fj, u, 3);
  std::array<double, 4> prev{1e300, 1e300, 1e300, 1e300};
  for (double h : {1e-1, 5e-2, 2e-2, 1e-2}) {
    const auto err = exact.max_difference(finite_difference_oracle(fr, u, 3, h));
    for (int k = 1; k <= 3; ++k) {
      EXPECT_LT(err[k], prev[k]) << "order " << k << " step " << h;
    }
    prev = err;
  }
}

TEST(Derivatives, StencilMustStayInsideChart) {
  const RealMap fr = [](std::span<const double> v) { return sample_map<double>(v); };
  Chart c{{-1, -1, -1}, {1, 1, 1}};
  const std::vector<double> u{0.999, 0.0, 0.0};
  EXPECT_THROW(finite_difference_oracle(fr, u, 2, 1e-3, &c), DomainError);
  EXPECT_NO_THROW(finite_difference_oracle(fr, std::vector<double>{0.5, 0, 0}, 2, 1e-3, &c));
}

TEST(Derivatives, TensorRoundTripsThroughJets) {
  const std::vector<double> u{0.1, 0.3, -0.2};
  const JetMap fj = [](std::span<const Jet> v) { return sample_map<Jet>(v); };
  const auto t = evaluate_map_derivatives(fj, u, 3);
  const auto back = tensor_from_jets(t.to_jets(), 3, 3);
  const auto d = t.max_difference(back);
  for (double x : d) EXPECT_LT(x, 1e-15);
}
