#pragma once

// Report records and their JSON / CSV serializations. Field names are
// frozen in docs/report_schema.json.

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace prodgeo {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchema = "prodgeo-report/1";

struct CheckRecord {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  int samples = 0;
  bool gating = true;
  std::string status = "ok";  // ok | failed | informational | skipped: <reason>
  std::string note;
};

inline CheckRecord gated_check(std::string name, double residual, double tol, int samples,
                               std::string note = {}) {
  CheckRecord c{std::move(name), residual, tol, residual <= tol, samples, true, "ok", std::move(note)};
  if (!c.pass) c.status = "failed";
  return c;
}

inline CheckRecord info_check(std::string name, double residual, double tol, int samples,
                              std::string note = {}) {
  return CheckRecord{std::move(name), residual, tol, residual <= tol, samples, false, "informational",
                     std::move(note)};
}

inline CheckRecord skipped_check(std::string name, double tol, std::string reason) {
  return CheckRecord{std::move(name), 0.0, tol, true, 0, false, "skipped: " + std::move(reason), {}};
}

struct Report {
  std::string command;
  nlohmann::ordered_json config;
  nlohmann::ordered_json immersion;
  std::vector<CheckRecord> checks;
  nlohmann::ordered_json summaries = nlohmann::ordered_json::object();

  bool overall_pass() const {
    for (const auto& c : checks)
      if (c.gating && !c.pass) return false;
    return true;
  }

  const CheckRecord* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// JSON has no infinities or NaN; they are written as null.
inline nlohmann::ordered_json finite_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::ordered_json to_json(const CheckRecord& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["max_residual"] = finite_or_null(c.max_residual);
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  j["samples"] = c.samples;
  j["gating"] = c.gating;
  j["status"] = c.status;
  j["note"] = c.note;
  return j;
}

inline nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["tool"] = {{"name", "prodgeo"}, {"version", kToolVersion}};
  j["command"] = r.command;
  j["config"] = r.config;
  j["immersion"] = r.immersion;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  j["summaries"] = r.summaries;
  j["overall_pass"] = r.overall_pass();
  return j;
}

inline std::string report_json_text(const Report& r) { return to_json(r).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Plain decimal with 17 significant digits (no exponent). The digits come
/// from %.16e so the decimal exponent is exact.
inline std::string decimal17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", std::abs(v));
  const std::string sci(buf);
  const auto epos = sci.find('e');
  const int e = std::stoi(sci.substr(epos + 1));
  std::string digits = sci.substr(0, 1) + sci.substr(2, epos - 2);  // 17 digits
  std::string s;
  if (e < 0) {
    s = "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + digits;
  } else if (e + 1 >= static_cast<int>(digits.size())) {
    s = digits + std::string(static_cast<std::size_t>(e + 1) - digits.size(), '0');
  } else {
    s = digits.substr(0, static_cast<std::size_t>(e + 1)) + "." + digits.substr(static_cast<std::size_t>(e + 1));
  }
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return v < 0 ? "-" + s : s;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string report_csv_text(const Report& r) {
  std::ostringstream os;
  os << "name,max_residual,tolerance,pass,samples,gating,status,note\r\n";
  for (const auto& c : r.checks) {
    os << csv_field(c.name) << ',' << decimal17(c.max_residual) << ',' << decimal17(c.tolerance) << ','
       << (c.pass ? "true" : "false") << ',' << c.samples << ',' << (c.gating ? "true" : "false") << ','
       << csv_field(c.status) << ',' << csv_field(c.note) << "\r\n";
  }
  os << "overall_pass,,,"
     << (r.overall_pass() ? "true" : "false") << ",,,,\r\n";
  return os.str();
}

}  // namespace prodgeo
