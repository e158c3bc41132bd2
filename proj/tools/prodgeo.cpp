// prodgeo: analyze | verify | construct
//
// Exit codes: 0 every gating check passed, 2 a check failed,
// 1 usage or spec error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prodgeo/commands.hpp"

namespace {

std::pair<std::string, double> split_kv(const std::string& s, const char* flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw prodgeo::UsageError(std::string(flag) + " expects NAME=VALUE, got '" + s + "'");
  }
  const std::string key = s.substr(0, eq);
  const std::string val = s.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(val, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != val.size()) {
    throw prodgeo::UsageError(std::string(flag) + " " + key + ": '" + val + "' is not a number");
  }
  return {key, v};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw prodgeo::UsageError("cannot write '" + path + "'");
  out << text;
}

struct Options {
  std::string catalog;
  std::vector<std::string> params;
  std::string spec;
  int samples = 30;
  std::uint64_t seed = 1;
  std::vector<std::string> tols;
  bool json = false;
  bool csv = false;
  std::string out;
  std::string export_path;
};

void add_common(CLI::App* sub, Options& o) {
  auto* cat = sub->add_option("--catalog", o.catalog, "catalog entry name");
  sub->add_option("--param", o.params, "catalog parameter k=v (repeatable)")->expected(1, -1);
  auto* spec = sub->add_option("--spec", o.spec, "JSON spec file");
  cat->excludes(spec);
  sub->add_option("--samples", o.samples, "number of sample points");
  sub->add_option("--seed", o.seed, "64-bit seed");
  sub->add_option("--tol", o.tols, "tolerance override NAME=V (repeatable)")->expected(1, -1);
  auto* j = sub->add_flag("--json", o.json, "JSON report (default)");
  auto* c = sub->add_flag("--csv", o.csv, "CSV report");
  j->excludes(c);
  sub->add_option("--out", o.out, "report path (default stdout)");
}

prodgeo::RunConfig to_config(const Options& o) {
  prodgeo::RunConfig c;
  if (!o.spec.empty()) {
    if (!o.params.empty()) throw prodgeo::UsageError("--param only applies to --catalog");
    c.source = prodgeo::RunConfig::Source::spec_file;
    c.spec_path = o.spec;
  } else {
    c.source = prodgeo::RunConfig::Source::catalog;
    c.catalog_name = o.catalog;
  }
  for (const auto& p : o.params) {
    const auto [k, v] = split_kv(p, "--param");
    c.params[k] = v;
  }
  for (const auto& t : o.tols) {
    const auto [k, v] = split_kv(t, "--tol");
    c.tol_overrides[k] = v;
  }
  c.samples = o.samples;
  c.seed = o.seed;
  c.format = o.csv ? prodgeo::RunConfig::Format::csv : prodgeo::RunConfig::Format::json;
  c.out = o.out;
  c.export_path = o.export_path;
  return c;
}

std::string render(const prodgeo::Report& r, const prodgeo::RunConfig& c) {
  return c.format == prodgeo::RunConfig::Format::csv ? prodgeo::report_csv_text(r)
                                                     : prodgeo::report_json_text(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Submanifolds of Q^n_eps x R: analysis, verification and construction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", prodgeo::kToolVersion);
  Options o;
  auto* analyze = app.add_subcommand("analyze", "flat-normal analysis of an immersion");
  auto* verify = app.add_subcommand("verify", "fundamental-equation residuals");
  auto* construct = app.add_subcommand("construct", "build and certify an extrinsic warped product");
  add_common(analyze, o);
  add_common(verify, o);
  add_common(construct, o);
  construct->add_option("--export", o.export_path, "CSV of sampled ambient points");
  auto* list = app.add_subcommand("list", "print the catalog registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (list->parsed()) {
      for (const auto& e : prodgeo::catalog::registry()) {
        std::cout << e.name << "  (";
        for (std::size_t i = 0; i < e.params.size(); ++i) std::cout << (i ? ", " : "") << e.params[i];
        std::cout << ")  " << e.description << "\n";
      }
      return 0;
    }
    const prodgeo::RunConfig cfg = to_config(o);
    prodgeo::Report report;
    if (analyze->parsed()) {
      report = prodgeo::cmd_analyze(cfg);
    } else if (verify->parsed()) {
      report = prodgeo::cmd_verify(cfg);
    } else {
      const prodgeo::ConstructResult r = prodgeo::cmd_construct(cfg);
      report = r.report;
      if (!cfg.export_path.empty()) {
        const auto& f = report.immersion;
        write_text(cfg.export_path,
                   prodgeo::export_csv_text(r, f["dim"].get<int>(), f["ambient"]["n"].get<int>()));
      }
    }
    write_text(cfg.out, render(report, cfg));
    return report.overall_pass() ? 0 : 2;
  } catch (const prodgeo::Error& e) {
    std::cerr << "prodgeo: error: " << e.what() << "\n";
    return 1;
  }
}
