#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prodgeo/catalog.hpp"
#include "prodgeo/flat_normal.hpp"
#include "prodgeo/sampling.hpp"

using namespace prodgeo;

namespace {

std::vector<Vecd> points(const ParametricImmersion& f, int n = 5) { return sample_chart(f.chart(), n, 23); }

}  // namespace

TEST(ClassA, CatalogVerdictsMatchMetadata) {
  for (const auto& f : catalog::all_defaults()) {
    if (!f.expected().class_a) continue;
    for (const auto& u : points(f)) {
      const auto r = class_a_test(f, u);
      EXPECT_EQ(r.is_class_a, *f.expected().class_a) << f.name() << " defect " << r.defect;
    }
  }
}

TEST(ClassA, GenericGraphHasLargeDefect) {
  const auto f = catalog::make("generic_graph_hypersurface");
  double worst = 0.0;
  for (const auto& u : points(f, 10)) worst = std::max(worst, class_a_test(f, u).defect);
  EXPECT_GT(worst, 1e-2);
}

TEST(ClassA, VanishingTCountsAsClassA) {
  const auto f = catalog::slice_small_sphere(3, 0.6);
  const auto r = class_a_test(f, points(f, 1)[0]);
  EXPECT_TRUE(r.t_vanishes);
  EXPECT_TRUE(r.is_class_a);
}

TEST(Einstein, FitsOfClosedFormEntries) {
  {
    const auto f = catalog::make("vertical_cylinder");  // Ric eigenvalues {0, 2, 2}
    const auto fit = einstein_fit(f, points(f));
    EXPECT_FALSE(fit.is_einstein);
    EXPECT_NEAR(fit.lambda_hat, 4.0 / 3.0, 1e-9);
    EXPECT_NEAR(fit.max_dev, 4.0 / 3.0, 1e-9);
  }
  {
    const auto f = catalog::make("clifford_product");
    const auto fit = einstein_fit(f, points(f));
    EXPECT_TRUE(fit.is_einstein);
    EXPECT_NEAR(fit.lambda_hat, 2.0, 1e-9);
  }
  {
    const auto f = catalog::make("torus_cylinder");
    const auto fit = einstein_fit(f, points(f));
    EXPECT_TRUE(fit.is_einstein);
    EXPECT_NEAR(fit.lambda_hat, 0.0, 1e-9);
  }
  EXPECT_THROW(einstein_fit(std::vector<Matd>{}), DomainError);
}

TEST(Identity, ClosedFormTargets) {
  struct Case {
    ParametricImmersion f;
    double both;
  };
  const std::vector<Case> cases{{catalog::slice_totally_geodesic(3), 0.0},
                                {catalog::slice_small_sphere(4, std::sqrt(0.5)), 1.0},
                                {catalog::clifford_product(2, 2, std::sqrt(0.5)), 1.0}};
  for (const auto& c : cases) {
    const auto samples = points(c.f);
    const auto fit = einstein_fit(c.f, samples);
    ASSERT_TRUE(fit.is_einstein) << c.f.name();
    for (const auto& u : samples) {
      const PointGeometry pg = point_geometry(c.f, u);
      const auto rep = xi_identity_report(pg, principal_decomposition(pg), fit);
      for (const auto& e : rep.entries) {
        ASSERT_TRUE(e.applicable);
        EXPECT_NEAR(e.lhs, c.both, 1e-9) << c.f.name();
        EXPECT_NEAR(e.rhs, c.both, 1e-9) << c.f.name();
        EXPECT_LT(e.mxi_residual, 1e-9) << c.f.name();
      }
    }
  }
}

TEST(Identity, HandComputedSphereValues) {
  // S^4(r) in S^5: xi = H with |H| = kappa, lambda = 3 / r^2, eta unit.
  const double r = 0.8;
  const double kappa = std::sqrt(1 - r * r) / r;
  const auto f = catalog::slice_small_sphere(4, r);
  const PointGeometry pg = point_geometry(f, points(f, 1)[0]);
  const auto rep = xi_identity_report(pg, principal_decomposition(pg), 3.0 / (r * r));
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_NEAR(rep.entries[0].lhs, kappa * kappa, 1e-12);
  EXPECT_NEAR(rep.entries[0].rhs, 4 * kappa * kappa - 3 / (r * r) + 2 + 1, 1e-12);
  EXPECT_LT(rep.max_residual(), 1e-12);
}

TEST(Identity, RequiresAcceptedFitAndFlatness) {
  const auto f = catalog::make("vertical_cylinder");
  const PointGeometry pg = point_geometry(f, points(f, 1)[0]);
  const auto fit = einstein_fit(f, points(f));
  EXPECT_THROW(xi_identity_report(pg, principal_decomposition(pg), fit), NotEinsteinError);
  const auto g = catalog::make("generic_codim2_surface");
  EXPECT_THROW(xi_identity_report(point_geometry(g, points(g, 1)[0]), PrincipalDecomposition{}, 1.0),
               FlatnessError);
}

TEST(Identity, TOnlyBlockIsNotApplicable) {
  const auto f = catalog::make("torus_cylinder");
  const PointGeometry pg = point_geometry(f, points(f, 1)[0]);
  const auto dec = principal_decomposition(pg);
  const auto rep = xi_identity_report(pg, dec, 0.0);
  ASSERT_TRUE(dec.t_index.has_value());
  EXPECT_FALSE(rep.entries[*dec.t_index].applicable);
  EXPECT_LT(rep.max_residual(), 1e-9);
}

TEST(Lifted, BlocksMatchBruteForceContainerForm) {
  for (const char* name : {"vertical_cylinder", "rotational_graph", "multirotational", "torus_cylinder"}) {
    const auto f = catalog::make(name);
    const auto u = points(f, 1)[0];
    const LocalGeometry lg(f, u);
    const PointGeometry& pg = lg.point();
    const auto lifted = lifted_decomposition(lg, principal_decomposition(pg));
    EXPECT_TRUE(lifted.includes_t_block);
    EXPECT_LT(lifted.max_residual(), 1e-9) << name;
    const int m = pg.m;
    for (const auto& b : lifted.blocks) {
      for (int p = 0; p < b.basis.cols(); ++p) {
        const Vecd c = pg.coord_direction(b.basis.column(p));
        Eigen::VectorXd ref = Eigen::VectorXd::Zero(f.space().dim());
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) ref += c[k] * c[l] * oracle::alpha_container(f, u, k, l);
        for (int a = 0; a < f.space().dim(); ++a)
          EXPECT_NEAR(b.lifted_normal[a], ref(a), 1e-6) << name << " " << b.label;
      }
    }
  }
}

TEST(Lifted, VanishingTIsDegenerate) {
  const auto f = catalog::make("slice_small_sphere");
  const LocalGeometry lg(f, points(f, 1)[0]);
  const auto dec = principal_decomposition(lg.point());
  EXPECT_THROW(lifted_decomposition(lg, dec), DegenerateTError);
  const auto r = lifted_decomposition(lg, dec, true);
  EXPECT_FALSE(r.includes_t_block);
  EXPECT_LT(r.max_residual(), 1e-9);
}

TEST(Lifted, NonClassAIsRejected) {
  const auto f = catalog::make("generic_graph_hypersurface");
  const LocalGeometry lg(f, points(f, 1)[0]);
  EXPECT_THROW(lifted_decomposition(lg, principal_decomposition(lg.point())), GeometryError);
}

TEST(Distribution, MultirotationalBlocksAreSpherical) {
  const auto f = catalog::make("multirotational");
  for (const auto& u : points(f, 4)) {
    const LocalGeometry lg(f, u);
    const auto dec = principal_decomposition(lg.point());
    const auto rep = distribution_checks(lg, dec);
    EXPECT_LT(rep.max_residual(), 1e-5);
    EXPECT_FALSE(rep.entries.empty());
    EXPECT_LT(parallelism_residual(lg, dec), 1e-5);
  }
}

TEST(Distribution, CircleBlocksHaveNonzeroDelta) {
  // The circle blocks of the multirotational example have nonzero delta,
  // so claiming they are totally geodesic must fail.
  const auto f = catalog::make("multirotational");
  const LocalGeometry lg(f, points(f, 1)[0]);
  const auto rep = distribution_checks(lg, principal_decomposition(lg.point()));
  double dmax = 0.0;
  for (const auto& e : rep.entries) dmax = std::max(dmax, norm(e.delta));
  EXPECT_GT(dmax, 1e-2);
}

TEST(Distribution, DegenerateInputs) {
  const auto s = catalog::make("slice_small_sphere");
  const LocalGeometry ls(s, points(s, 1)[0]);
  EXPECT_THROW(distribution_checks(ls, principal_decomposition(ls.point())), DegenerateTError);
  const auto g = catalog::make("generic_graph_hypersurface");
  const LocalGeometry lg(g, points(g, 1)[0]);
  EXPECT_THROW(distribution_checks(lg, principal_decomposition(lg.point())), GeometryError);
}

TEST(Distribution, IndependenceAngle) {
  PrincipalDecomposition dec;
  dec.s = 3;
  dec.xi = {{0, 0}, {1, 0}, {0, 1}};
  EXPECT_NEAR(independence_angle(dec), std::acos(1 / std::sqrt(2.0)), 1e-12);
  dec.xi = {{0, 0}, {1, 0}, {2, 0}};
  EXPECT_NEAR(independence_angle(dec), 0.0, 1e-12);
  dec.s = 2;
  EXPECT_TRUE(std::isinf(independence_angle(dec)));
}

TEST(MinimalBound, CliffordAndSlice) {
  {
    const auto f = catalog::make("clifford_product");
    const auto r = minimal_ricci_bound(f, points(f));
    EXPECT_NEAR(r.max_ricci, 2.0 / 3.0, 1e-9);
    EXPECT_LT(r.gap, 0.0);
    EXPECT_FALSE(r.is_slice_equality);
  }
  {
    const auto f = catalog::make("slice_totally_geodesic");
    const auto r = minimal_ricci_bound(f, points(f));
    EXPECT_NEAR(r.max_ricci, 1.0, 1e-12);
    EXPECT_TRUE(r.is_slice_equality);
  }
  const auto c = catalog::make("vertical_cylinder");
  EXPECT_THROW(minimal_ricci_bound(c, points(c)), NotMinimalError);
}

TEST(Parallelism, UmbilicAndCliffordNormalsAreParallel) {
  for (const char* name : {"slice_small_sphere", "clifford_product"}) {
    const auto f = catalog::make(name);
    for (const auto& u : points(f, 3)) {
      const LocalGeometry lg(f, u);
      EXPECT_LT(parallelism_residual(lg, principal_decomposition(lg.point())), 1e-8) << name;
      EXPECT_LT(mean_curvature_derivative(lg), 1e-8) << name;
    }
  }
}

TEST(Parallelism, RotationalGraphMeanCurvatureIsNotParallel) {
  const auto f = catalog::make("rotational_graph");
  const LocalGeometry lg(f, points(f, 1)[0]);
  EXPECT_GT(mean_curvature_derivative(lg), 1e-3);
}
