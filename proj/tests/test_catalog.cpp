#include <gtest/gtest.h>

#include <cmath>

#include "prodgeo/catalog.hpp"
#include "prodgeo/commands.hpp"
#include "prodgeo/flat_normal.hpp"
#include "prodgeo/sampling.hpp"

using namespace prodgeo;

namespace {

// Brute-force values on the 30 points drawn with seed 1 (finite-difference
// oracle in tests/oracles.hpp, rounded down to three significant digits).
constexpr double kCodim2NormalCurvatureGolden = 0.377;  // min ||R^perp(e1, e2)||, entry seed 7
constexpr double kGraphClassADefectGolden = 0.772;      // max class-A defect, entry seed 7

// ||R^perp(e1, e2)|| from both sides of the Ricci equation: sqrt of the sum
// over normal-frame pairs a < b.
std::pair<double, double> normal_curvature_norms(const LocalGeometry& lg) {
  const int r = lg.normal_rank();
  double l2 = 0.0, r2 = 0.0;
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b) {
      Vecd xa(static_cast<std::size_t>(r), 0.0), xb = xa;
      xa[a] = 1.0;
      xb[b] = 1.0;
      const auto [l, rr] = ricci_equation_sides(lg, {1, 0}, {0, 1}, xa, xb);
      l2 += l * l;
      r2 += rr * rr;
    }
  return {std::sqrt(l2), std::sqrt(r2)};
}

RunConfig catalog_config(const std::string& name, catalog::Params p = {}, int samples = 30) {
  RunConfig c;
  c.catalog_name = name;
  c.params = std::move(p);
  c.samples = samples;
  return c;
}

}  // namespace

TEST(Catalog, RegistryBuildsEveryEntry) {
  ASSERT_EQ(catalog::registry().size(), 9u);
  for (const auto& e : catalog::registry()) {
    const auto f = catalog::make(e.name);
    EXPECT_EQ(f.name(), e.name);
    for (const auto& u : sample_chart(f.chart(), 3, 1)) EXPECT_LT(validate_point(f.space(), f(u)), 1e-12) << e.name;
  }
  EXPECT_EQ(catalog::all_defaults().size(), 9u);
}

TEST(Catalog, UnknownNamesAndBadParameters) {
  EXPECT_THROW(catalog::make("klein_bottle"), UnknownEntryError);
  EXPECT_THROW(catalog::make("slice_small_sphere", {{"r", 1.5}}), ParamRangeError);
  EXPECT_THROW(catalog::make("slice_small_sphere", {{"m", 1}}), ParamRangeError);
  EXPECT_THROW(catalog::make("slice_small_sphere", {{"m", 2.5}}), ParamRangeError);
  EXPECT_THROW(catalog::make("vertical_cylinder", {{"radius", 0.5}}), ParamRangeError);
  EXPECT_THROW(catalog::make("clifford_product", {{"p", 5}, {"q", 4}}), ParamRangeError);
  EXPECT_THROW(catalog::make("slice_totally_geodesic", {{"epsilon", 0}}), ParamRangeError);
  EXPECT_THROW(catalog::make("generic_codim2_surface", {{"seed", -3}}), ParamRangeError);
}

TEST(Catalog, SeededEntriesAreDeterministic) {
  const std::vector<double> u{0.1, -0.2};
  const auto a = catalog::make("generic_codim2_surface", {{"seed", 11}});
  const auto b = catalog::make("generic_codim2_surface", {{"seed", 11}});
  const auto c = catalog::make("generic_codim2_surface", {{"seed", 12}});
  EXPECT_EQ(a(u), b(u));
  EXPECT_NE(a(u), c(u));
}

TEST(Catalog, ClosedFormMetadata) {
  const auto s = catalog::make("slice_totally_geodesic");
  EXPECT_DOUBLE_EQ(*s.expected().einstein_constant, 2.0);
  EXPECT_EQ(*s.expected().num_principal, 1);
  const auto c = catalog::make("clifford_product");
  EXPECT_DOUBLE_EQ(*c.expected().einstein_constant, 2.0);
  EXPECT_EQ(c.expected().dims, (std::vector<int>{2, 2}));
  EXPECT_TRUE(*c.expected().minimal);
  const auto v = catalog::make("vertical_cylinder");
  EXPECT_EQ(v.expected().dims, (std::vector<int>{1, 2}));
  EXPECT_FALSE(*v.expected().einstein);
}

TEST(Catalog, AnalysisReproducesExpectedMetadata) {
  for (const auto& e : catalog::registry()) {
    const Report r = cmd_analyze(catalog_config(e.name));
    const CheckRecord* m = r.find("expected_metadata");
    ASSERT_NE(m, nullptr) << e.name;
    EXPECT_TRUE(m->pass) << e.name << ": " << m->note;
  }
}

TEST(Catalog, ControlsBehaveAsControls) {
  {
    const auto f = catalog::make("generic_codim2_surface");
    for (const auto& u : sample_chart(f.chart(), 30, 1)) EXPECT_FALSE(flatness_test(f, u).is_flat);
  }
  {
    const auto f = catalog::make("generic_graph_hypersurface");
    bool any_fail = false;
    for (const auto& u : sample_chart(f.chart(), 30, 1)) any_fail = any_fail || !class_a_test(f, u).is_class_a;
    EXPECT_TRUE(any_fail);
  }
}

TEST(Catalog, GoldenControlMagnitudes) {
  {
    const auto f = catalog::make("generic_codim2_surface");
    double least = 1e300;
    for (const auto& u : sample_chart(f.chart(), 30, 1)) {
      const auto [lhs, rhs] = normal_curvature_norms(LocalGeometry(f, u));
      EXPECT_NEAR(lhs, rhs, 1e-7);
      EXPECT_GE(std::min(lhs, rhs), kCodim2NormalCurvatureGolden);
      least = std::min(least, lhs);
    }
    EXPECT_LT(least, kCodim2NormalCurvatureGolden + 1e-3);
  }
  {
    const auto f = catalog::make("generic_graph_hypersurface");
    double worst = 0.0;
    for (const auto& u : sample_chart(f.chart(), 30, 1)) worst = std::max(worst, class_a_test(f, u).defect);
    EXPECT_GE(worst, kGraphClassADefectGolden);
    EXPECT_LT(worst, kGraphClassADefectGolden + 1e-3);
  }
}

TEST(Catalog, CliExamples) {
  const Report cl = cmd_analyze(catalog_config("clifford_product", {{"p", 2}, {"q", 2}, {"r", 0.7071067811865476}}));
  EXPECT_TRUE(cl.overall_pass());
  EXPECT_NEAR(cl.summaries["einstein_fit"]["lambda_hat"].get<double>(), 2.0, 1e-6);
  const Report g = cmd_analyze(catalog_config("generic_graph_hypersurface", {{"seed", 7}}));
  EXPECT_FALSE(g.overall_pass());
  EXPECT_FALSE(g.find("class_a")->pass);
}
