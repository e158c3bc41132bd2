#pragma once

// JSON immersion specs:
//
//   {"ambient": {"epsilon": 1, "n": 3},
//    "kind": "catalog", "name": "vertical_cylinder", "params": {"m": 3, "r": 0.7}}
//
//   {"ambient": {"epsilon": 1, "n": 4},
//    "kind": "warped_product",
//    "q": [1, 0, 0, 0, 0],
//    "z": [[0, 1, 0, 0, 0], [0, -1, 1, 0, 0]],
//    "factor_dims": [2, 1, 1],
//    "c": 1,                                         (optional)
//    "profile": {"kind": "curve", "coords": [[...], [...]], "height": [...],
//                "s_range": [-0.5, 0.5]}
//             | {"kind": "point", "x": [...], "t0": 0},
//    "factors": [{"kind": "identity", "half_width": 0.4},
//                {"kind": "small_sphere", "radius": 0.5, "half_width": 0.4}]}

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "prodgeo/catalog.hpp"
#include "prodgeo/errors.hpp"
#include "prodgeo/warped.hpp"

namespace prodgeo {

struct WarpedConstruction {
  WarpedProductSpec spec;
  ProfileSpec profile;
  std::vector<FactorSpec> factors;
};

struct ParsedSpec {
  std::string kind;  // "catalog" | "warped_product"
  std::string name;
  catalog::Params params;
  std::optional<WarpedConstruction> warped;
  nlohmann::ordered_json echo;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SpecMismatchError(std::string("spec: missing field '") + key + "'");
  }
  return j.at(key);
}

inline Vecd to_vec(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw SpecMismatchError(std::string("spec: ") + what + " must be an array");
  Vecd v;
  for (const auto& x : j) {
    if (!x.is_number()) throw SpecMismatchError(std::string("spec: ") + what + " must hold numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

inline int to_int(const nlohmann::json& j, const char* what) {
  if (!j.is_number_integer()) throw SpecMismatchError(std::string("spec: ") + what + " must be an integer");
  return j.get<int>();
}

inline ProfileSpec parse_profile(const nlohmann::json& j, int n0) {
  ProfileSpec p;
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "point") {
    p.kind = ProfileSpec::Kind::point;
    const Vecd x = j.contains("x") ? to_vec(j.at("x"), "profile.x") : Vecd(static_cast<std::size_t>(n0), 0.0);
    if (static_cast<int>(x.size()) != n0) throw SpecMismatchError("spec: profile.x must have n_0 entries");
    for (double v : x) p.coords.push_back({v});
    p.height = {j.value("t0", 0.0)};
  } else if (kind == "curve") {
    p.kind = ProfileSpec::Kind::curve;
    for (const auto& c : require(j, "coords")) p.coords.push_back(to_vec(c, "profile.coords"));
    p.height = to_vec(require(j, "height"), "profile.height");
    if (j.contains("s_range")) {
      const Vecd r = to_vec(j.at("s_range"), "profile.s_range");
      if (r.size() != 2) throw SpecMismatchError("spec: profile.s_range must have two entries");
      p.s_lower = r[0];
      p.s_upper = r[1];
    }
  } else {
    throw SpecMismatchError("spec: unknown profile kind '" + kind + "'");
  }
  return p;
}

inline FactorSpec parse_factor(const nlohmann::json& j) {
  FactorSpec f;
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "identity") {
    f.kind = FactorSpec::Kind::identity;
  } else if (kind == "small_sphere") {
    f.kind = FactorSpec::Kind::small_sphere;
    f.radius = require(j, "radius").get<double>();
  } else {
    throw SpecMismatchError("spec: unknown factor kind '" + kind + "'");
  }
  f.half_width = j.value("half_width", 0.4);
  return f;
}

}  // namespace detail

/// Parses a spec document; all validation errors are SpecMismatchError
/// (or the catalog's UnknownEntryError / ParamRangeError).
inline ParsedSpec parse_spec(const nlohmann::json& j) {
  using namespace detail;
  ParsedSpec out;
  if (!j.is_object()) throw SpecMismatchError("spec: document must be an object");
  const auto& amb = require(j, "ambient");
  const int eps = to_int(require(amb, "epsilon"), "ambient.epsilon");
  const int n = to_int(require(amb, "n"), "ambient.n");
  const AmbientSpace space(eps, n);
  out.kind = require(j, "kind").get<std::string>();
  if (out.kind == "catalog") {
    out.name = require(j, "name").get<std::string>();
    if (j.contains("params")) {
      for (const auto& [k, v] : j.at("params").items()) {
        if (!v.is_number()) throw SpecMismatchError("spec: parameter '" + k + "' must be a number");
        out.params[k] = v.get<double>();
      }
    }
    const ParametricImmersion f = catalog::make(out.name, out.params);
    if (f.space().epsilon() != eps || f.space().n() != n) {
      throw SpecMismatchError("spec: ambient does not match catalog entry '" + out.name + "' (epsilon " +
                              std::to_string(f.space().epsilon()) + ", n " +
                              std::to_string(f.space().n()) + ")");
    }
  } else if (out.kind == "warped_product") {
    const Vecd q = to_vec(require(j, "q"), "q");
    if (static_cast<int>(q.size()) != n + 1) {
      throw SpecMismatchError("spec: q must have n + 1 = " + std::to_string(n + 1) + " coordinates");
    }
    Vecd qp = q;
    qp.push_back(0.0);
    const double res = validate_point(space, qp);
    if (res > 1e-10) {
      throw SpecMismatchError("spec: q is not on Q^n_eps (validate_point residual " + std::to_string(res) + ")");
    }
    std::vector<Vecd> z;
    for (const auto& v : require(j, "z")) z.push_back(to_vec(v, "z"));
    std::vector<int> dims;
    for (const auto& v : require(j, "factor_dims")) dims.push_back(to_int(v, "factor_dims"));
    std::optional<double> c;
    if (j.contains("c")) c = j.at("c").get<double>();
    WarpedProductSpec spec(eps, n, q, z, dims, c);
    ProfileSpec profile = parse_profile(require(j, "profile"), dims.empty() ? 0 : dims[0]);
    std::vector<FactorSpec> factors;
    if (j.contains("factors")) {
      for (const auto& f : j.at("factors")) factors.push_back(parse_factor(f));
    } else {
      factors.assign(z.size(), FactorSpec{});
    }
    out.name = j.value("name", std::string("warped_product"));
    out.warped = WarpedConstruction{spec, profile, factors};
  } else {
    throw SpecMismatchError("spec: unknown kind '" + out.kind + "'");
  }
  out.echo = nlohmann::ordered_json::parse(j.dump());
  return out;
}

inline ParsedSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecMismatchError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecMismatchError(std::string("spec file is not valid JSON: ") + e.what());
  }
  return parse_spec(j);
}

inline ParametricImmersion build_from_spec(const ParsedSpec& s) {
  if (s.kind == "catalog") return catalog::make(s.name, s.params);
  const auto& w = *s.warped;
  return build_extrinsic_warped_product(w.spec, w.profile, w.factors, s.name);
}

}  // namespace prodgeo
