#include <gtest/gtest.h>

#include <cmath>

#include "prodgeo/ambient.hpp"
#include "prodgeo/immersion.hpp"

using namespace prodgeo;

TEST(Ambient, RejectsBadParameters) {
  EXPECT_THROW(AmbientSpace(0, 3), SpecMismatchError);
  EXPECT_THROW(AmbientSpace(1, 1), SpecMismatchError);
  EXPECT_THROW(AmbientSpace(-1, 13), SpecMismatchError);
  EXPECT_NO_THROW(AmbientSpace(-1, 2));
}

TEST(Ambient, InnerProductSignature) {
  const AmbientSpace s(1, 2), h(-1, 2);
  const Vecd a{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(s.inner(a, a), 30.0);
  EXPECT_DOUBLE_EQ(h.inner(a, a), 28.0);
  EXPECT_EQ(s.dim(), 4);
  EXPECT_EQ(s.time_index(), 3);
}

TEST(Ambient, ValidatePointOnSphereAndHyperboloid) {
  const AmbientSpace s(1, 2), h(-1, 2);
  EXPECT_NEAR(validate_point(s, {0.6, 0.8, 0.0, 5.0}), 0.0, 1e-15);
  EXPECT_NEAR(validate_point(s, {1.0, 1.0, 0.0, 0.0}), 1.0, 1e-15);
  const double c = std::cosh(0.7), sh = std::sinh(0.7);
  EXPECT_NEAR(validate_point(h, {c, sh, 0.0, -2.0}), 0.0, 1e-14);
  EXPECT_TRUE(on_product(h, {c, sh, 0.0, 0.0}, 1e-12));
  EXPECT_FALSE(on_product(h, {-c, sh, 0.0, 0.0}, 1e-12));  // lower sheet
  EXPECT_THROW(validate_point(s, {1.0, 0.0}), GeometryError);
}

TEST(Ambient, InclusionNormalAndProjection) {
  for (int eps : {1, -1}) {
    const AmbientSpace s(eps, 2);
    const Vecd p = eps > 0 ? Vecd{0.6, 0.0, 0.8, 1.0} : Vecd{std::cosh(0.3), std::sinh(0.3), 0.0, 1.0};
    const Vecd nb = s.inclusion_normal(p);
    EXPECT_NEAR(s.inner(nb, nb), eps, 1e-14);
    EXPECT_DOUBLE_EQ(nb[3], 0.0);
    const Vecd v{0.3, -1.2, 0.7, 2.0};
    const Vecd w = s.project_to_product(p, v);
    EXPECT_NEAR(s.inner(w, nb), 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(w[3], v[3]);
    // projecting twice changes nothing
    const Vecd w2 = s.project_to_product(p, w);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(w2[k], w[k], 1e-15);
  }
}

TEST(Ambient, VerticalFieldIsUnitAndOrthogonalToQ) {
  const AmbientSpace s(-1, 3);
  const Vecd dt = s.vertical();
  EXPECT_DOUBLE_EQ(s.inner(dt, dt), 1.0);
  EXPECT_DOUBLE_EQ(s.inner(dt, s.inclusion_normal(Vecd{1, 0, 0, 0, 7})), 0.0);
}

TEST(Ambient, InclusionShapeKillsTheVerticalPart) {
  const AmbientSpace s(1, 2);
  const Vecd p{1, 0, 0, 0};
  const Vecd z{0, 0.5, -0.2, 3.0};
  const Vecd a = inclusion_shape(s, p, z);
  EXPECT_DOUBLE_EQ(a[1], -0.5);
  EXPECT_DOUBLE_EQ(a[2], 0.2);
  EXPECT_DOUBLE_EQ(a[3], 0.0);
  EXPECT_THROW(inclusion_shape(s, p, Vecd{1, 0, 0, 0}), GeometryError);
}

TEST(Ambient, ProductConnectionOfCircles) {
  const AmbientSpace s(1, 2);
  // great circle: velocity is parallel
  {
    const Jet t = Jet::variable(0, 0.4, 2, 1);
    const Vec<Jet> p{cos(t), sin(t), Jet(0.0), Jet(0.0)};
    const Vec<Jet> w{-sin(t), cos(t), Jet(0.0), Jet(0.0)};
    const Vecd r = product_connection(s, p, w, {1.0});
    EXPECT_LT(norm(r), 1e-15);
  }
  // small circle at height a: |nabla_W W| = a b (geodesic curvature a/b times b^2)
  {
    const double a = 0.6, b = 0.8;
    const Jet t = Jet::variable(0, 1.1, 2, 1);
    const Vec<Jet> p{Jet(a), b * cos(t), b * sin(t), Jet(0.0)};
    const Vec<Jet> w{Jet(0.0), -b * sin(t), b * cos(t), Jet(0.0)};
    const Vecd r = product_connection(s, p, w, {1.0});
    EXPECT_NEAR(norm(r), a * b, 1e-15);
    EXPECT_NEAR(s.inner(r, s.inclusion_normal(values(p))), 0.0, 1e-15);
  }
  {
    const Jet t = Jet::variable(0, 0.0, 2, 1);
    const Vec<Jet> p{cos(t), sin(t), Jet(0.0), Jet(0.0)};
    const Vec<Jet> bad{cos(t), sin(t), Jet(0.0), Jet(0.0)};  // normal, not tangent
    EXPECT_THROW(product_connection(s, p, bad, {1.0}), GeometryError);
  }
}

TEST(Ambient, GnomonicPointsLieOnQ) {
  for (int eps : {1, -1}) {
    const AmbientSpace s(eps, 3);
    const Vecd x{0.2, -0.3, 0.1};
    Vecd p = gnomonic_point<double>(x, eps);
    p.push_back(0.0);
    EXPECT_LT(validate_point(s, p), 1e-14);
    EXPECT_GT(p[0], 0.0);
  }
}
