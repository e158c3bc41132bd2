#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "prodgeo/commands.hpp"

using namespace prodgeo;

namespace {

const std::string kSource = PRODGEO_SOURCE_DIR;
const std::string kCli = PRODGEO_CLI_PATH;

std::string spec_path(const std::string& name) { return kSource + "/examples/specs/" + name; }

RunConfig catalog_run(const std::string& name, catalog::Params p = {}, int samples = 10) {
  RunConfig c;
  c.catalog_name = name;
  c.params = std::move(p);
  c.samples = samples;
  return c;
}

RunConfig file_run(const std::string& file, int samples = 10) {
  RunConfig c;
  c.source = RunConfig::Source::spec_file;
  c.spec_path = spec_path(file);
  c.samples = samples;
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string out = (dir / "prodgeo_cli_out.txt").string();
  const std::string err = (dir / "prodgeo_cli_err.txt").string();
  const std::string cmd = "\"" + kCli + "\" " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

std::string temp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

TEST(Config, ValidationErrors) {
  RunConfig c = catalog_run("clifford_product");
  c.samples = 0;
  EXPECT_THROW(cmd_analyze(c), UsageError);
  c.samples = 5;
  c.tol_overrides["gauss"] = -1.0;
  EXPECT_THROW(cmd_verify(c), UsageError);
  c.tol_overrides = {{"no_such_tolerance", 1.0}};
  EXPECT_THROW(cmd_verify(c), UsageError);
  c.tol_overrides.clear();
  c.catalog_name.clear();
  EXPECT_THROW(cmd_verify(c), UsageError);
}

TEST(Config, ToleranceOverridesAreEchoedAndUsed) {
  RunConfig c = catalog_run("vertical_cylinder", {}, 3);
  c.tol_overrides["gauss"] = 2e-7;
  const Report r = cmd_verify(c);
  EXPECT_DOUBLE_EQ(r.config["tolerances"]["gauss"].get<double>(), 2e-7);
  EXPECT_DOUBLE_EQ(r.find("gauss")->tolerance, 2e-7);
}

TEST(Verify, SliceResidualsAreTiny) {
  const Report r = cmd_verify(catalog_run("slice_totally_geodesic", {{"m", 3}}, 30));
  EXPECT_TRUE(r.overall_pass());
  for (const auto& c : r.checks) EXPECT_LT(c.max_residual, 1e-9) << c.name;
}

TEST(Verify, MultirotationalSpecFilePasses) {
  const Report r = cmd_verify(file_run("multirotational.json", 30));
  EXPECT_TRUE(r.overall_pass());
  EXPECT_LT(r.find("codazzi")->max_residual, 1e-5);
}

TEST(Verify, OffSphereSpecIsRejected) {
  try {
    cmd_verify(file_run("bad_point.json"));
    FAIL() << "expected SpecMismatchError";
  } catch (const SpecMismatchError& e) {
    EXPECT_NE(std::string(e.what()).find("validate_point"), std::string::npos) << e.what();
  }
}

TEST(Analyze, SkipsTDegenerateChecksExplicitly) {
  const Report r = cmd_analyze(catalog_run("slice_small_sphere"));
  EXPECT_TRUE(r.overall_pass());
  const CheckRecord* d = r.find("distribution");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->status, "skipped: T≈0");
  EXPECT_FALSE(d->gating);
}

TEST(Analyze, OverallPassFollowsGatingChecks) {
  Report r = cmd_analyze(catalog_run("generic_codim2_surface"));
  EXPECT_FALSE(r.overall_pass());
  EXPECT_FALSE(r.find("flatness")->pass);
  for (auto& c : r.checks)
    if (c.gating) c.pass = true;
  EXPECT_TRUE(r.overall_pass());
}

TEST(Construct, RotationalPointsLieOnTheSphere) {
  const ConstructResult r = cmd_construct(file_run("rotational_k1.json", 30));
  EXPECT_TRUE(r.report.overall_pass());
  ASSERT_EQ(r.points.size(), 30u);
  for (const auto& p : r.points) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) s += p[k] * p[k];
    EXPECT_NEAR(s, 1.0, 1e-9);
    EXPECT_EQ(p.size(), 5u);  // n + 2 coordinates
  }
  const std::string csv = export_csv_text(r, 3, 3);
  EXPECT_EQ(csv.substr(0, csv.find("\r\n")), "u0,u1,u2,x0,x1,x2,x3,t");
}

TEST(Construct, ConstantHeightGivesVanishingT) {
  const ConstructResult r = cmd_construct(file_run("slice_construction.json"));
  EXPECT_TRUE(r.report.overall_pass());
  for (const auto& t : r.report.summaries["t_norms"]) EXPECT_LT(t.get<double>(), 1e-10);
}

TEST(Construct, ConstraintViolationNamesThePair) {
  try {
    cmd_construct(file_run("bad_constraint.json"));
    FAIL() << "expected SpecMismatchError";
  } catch (const SpecMismatchError& e) {
    EXPECT_NE(std::string(e.what()).find("<z_1, z_2>"), std::string::npos) << e.what();
  }
  EXPECT_THROW(cmd_construct(file_run("clifford.json")), UsageError);
}

TEST(SpecFile, ParseErrors) {
  using nlohmann::json;
  EXPECT_THROW(parse_spec(json::array()), SpecMismatchError);
  EXPECT_THROW(parse_spec(json{{"kind", "catalog"}}), SpecMismatchError);
  EXPECT_THROW(parse_spec(json{{"ambient", {{"epsilon", 1}, {"n", 3}}}, {"kind", "torus"}}), SpecMismatchError);
  EXPECT_THROW(
      parse_spec(json{{"ambient", {{"epsilon", 1}, {"n", 5}}}, {"kind", "catalog"}, {"name", "vertical_cylinder"}}),
      SpecMismatchError);
  EXPECT_THROW(parse_spec(json{{"ambient", {{"epsilon", 1}, {"n", 3}}}, {"kind", "catalog"}, {"name", "nope"}}),
               UnknownEntryError);
  EXPECT_THROW(load_spec_file(spec_path("does_not_exist.json")), SpecMismatchError);
  const std::string garbage = temp_path("prodgeo_garbage.json");
  std::ofstream(garbage) << "{ not json";
  EXPECT_THROW(load_spec_file(garbage), SpecMismatchError);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

TEST(Serialization, Decimal17) {
  EXPECT_EQ(decimal17(0.0), "0");
  EXPECT_EQ(decimal17(0.1), "0.10000000000000001");
  EXPECT_EQ(decimal17(-2.5), "-2.5");
  EXPECT_EQ(decimal17(1e-20), "0.0000000000000000000099999999999999995");  // 1e-20 is 9.99999999999999945e-21
  EXPECT_EQ(decimal17(123456789.0), "123456789");
  EXPECT_EQ(decimal17(1e21), "1000000000000000000000");
  EXPECT_EQ(std::stod(decimal17(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Serialization, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Serialization, CsvReportShape) {
  const Report r = cmd_verify(catalog_run("clifford_product", {}, 3));
  const std::string csv = report_csv_text(r);
  EXPECT_EQ(csv.rfind("overall_pass,,,true,,,,\r\n"), csv.size() - 25);
  std::size_t rows = 0;
  for (std::size_t p = 0; (p = csv.find("\r\n", p)) != std::string::npos; p += 2) ++rows;
  EXPECT_EQ(rows, r.checks.size() + 2);
}

TEST(Serialization, InfinityIsWrittenAsNull) {
  Report r;
  r.command = "verify";
  r.checks.push_back(info_check("gap", std::numeric_limits<double>::infinity(), 1.0, 1));
  EXPECT_TRUE(to_json(r)["checks"][0]["max_residual"].is_null());
}

TEST(Serialization, IdenticalRunsAreByteIdentical) {
  const RunConfig c = catalog_run("multirotational", {}, 8);
  EXPECT_EQ(report_json_text(cmd_analyze(c)), report_json_text(cmd_analyze(c)));
  const RunConfig v = file_run("multirotational.json", 8);
  EXPECT_EQ(report_json_text(cmd_construct(v).report), report_json_text(cmd_construct(v).report));
}

TEST(Serialization, ReportsFollowTheSchema) {
  const auto schema = nlohmann::json::parse(read_file(kSource + "/docs/report_schema.json"));
  const std::regex status(schema["$defs"]["check"]["properties"]["status"]["pattern"].get<std::string>());
  const std::vector<Report> reports{cmd_analyze(catalog_run("rotational_graph", {}, 4)),
                                    cmd_verify(catalog_run("torus_cylinder", {}, 4)),
                                    cmd_construct(file_run("multirotational.json", 4)).report};
  for (const auto& r : reports) {
    const auto j = nlohmann::ordered_json::parse(report_json_text(r));
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, schema["required"].get<std::vector<std::string>>());
    for (const auto& key : {"config", "immersion", "tool"}) {
      for (const auto& req : schema["properties"][key]["required"]) EXPECT_TRUE(j[key].contains(req)) << key;
      for (const auto& [k, v] : j[key].items()) EXPECT_TRUE(schema["properties"][key]["properties"].contains(k)) << k;
    }
    const auto& check_schema = schema["$defs"]["check"];
    for (const auto& c : j["checks"]) {
      EXPECT_EQ(c.size(), check_schema["required"].size());
      for (const auto& req : check_schema["required"]) EXPECT_TRUE(c.contains(req));
      EXPECT_TRUE(std::regex_match(c["status"].get<std::string>(), status)) << c["status"];
    }
    EXPECT_EQ(j["schema"], schema["properties"]["schema"]["const"]);
  }
}

// ---------------------------------------------------------------------------
// The binary
// ---------------------------------------------------------------------------

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_cli("analyze --catalog clifford_product --param p=2 --param q=2 --param r=0.7071067811865476").code, 0);
  EXPECT_EQ(run_cli("analyze --catalog generic_graph_hypersurface --param seed=7").code, 2);
  const CliResult zero = run_cli("analyze --catalog clifford_product --samples 0");
  EXPECT_EQ(zero.code, 1);
  EXPECT_NE(zero.err.find("--samples"), std::string::npos);
  EXPECT_EQ(run_cli("verify --catalog slice_totally_geodesic --param m=3").code, 0);
  const CliResult bad = run_cli("verify --spec \"" + spec_path("bad_point.json") + "\"");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("validate_point"), std::string::npos) << bad.err;
  const CliResult pair = run_cli("construct --spec \"" + spec_path("bad_constraint.json") + "\"");
  EXPECT_EQ(pair.code, 1);
  EXPECT_NE(pair.err.find("<z_1, z_2>"), std::string::npos) << pair.err;
  EXPECT_EQ(run_cli("analyze --catalog no_such_entry").code, 1);
  EXPECT_EQ(run_cli("analyze --catalog clifford_product --json --csv").code, 1);
  EXPECT_EQ(run_cli("analyze --catalog clifford_product --tol gauss=abc").code, 1);
  EXPECT_EQ(run_cli("frobnicate").code, 1);
  EXPECT_EQ(run_cli("analyze").code, 1);
}

TEST(Binary, OutputMatchesTheLibrary) {
  const CliResult r = run_cli("verify --catalog clifford_product --samples 5 --seed 9");
  RunConfig c = catalog_run("clifford_product", {}, 5);
  c.seed = 9;
  EXPECT_EQ(r.out, report_json_text(cmd_verify(c)));
  const CliResult again = run_cli("verify --catalog clifford_product --samples 5 --seed 9");
  EXPECT_EQ(r.out, again.out);
  const std::string out = temp_path("prodgeo_report.csv");
  EXPECT_EQ(run_cli("verify --catalog clifford_product --samples 5 --seed 9 --csv --out \"" + out + "\"").code, 0);
  c.format = RunConfig::Format::csv;
  EXPECT_EQ(read_file(out), report_csv_text(cmd_verify(c)));
}

TEST(Binary, ConstructExport) {
  const std::string out = temp_path("prodgeo_points.csv");
  const CliResult r = run_cli("construct --spec \"" + spec_path("rotational_k1.json") + "\" --samples 7 --export \"" + out + "\"");
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(out);
  std::size_t rows = 0;
  for (std::size_t p = 0; (p = csv.find("\r\n", p)) != std::string::npos; p += 2) ++rows;
  EXPECT_EQ(rows, 8u);
  EXPECT_EQ(csv.find("e+"), std::string::npos);
  EXPECT_EQ(csv.find("e-"), std::string::npos);
}
