#include "wmkubo/scenario_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace wmkubo {

using nlohmann::json;

namespace {

void require_keys(const json& obj, std::string_view where,
                  std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

const json& field(const json& obj, std::string_view where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(std::string(where) + ": missing key '" + key + "'");
  }
  return *it;
}

double number(const json& v, std::string_view where) {
  if (!v.is_number()) throw ConfigError(std::string(where) + ": expected a number");
  return v.get<double>();
}

std::string text(const json& v, std::string_view where) {
  if (!v.is_string()) throw ConfigError(std::string(where) + ": expected a string");
  return v.get<std::string>();
}

Eigen::Index positive_index(const json& v, std::string_view where) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ConfigError(std::string(where) + ": expected a positive integer");
  }
  return static_cast<Eigen::Index>(v.get<long long>());
}

Complex complex_entry(const json& v, std::string_view where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(std::string(where) + ": complex entries are [re, im] pairs");
}

Operator operator_from(const json& v, std::string_view where) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError(std::string(where) + ": expected a non-empty array of rows");
  }
  const auto n = static_cast<Eigen::Index>(v.size());
  Operator op(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ConfigError(std::string(where) + ": operator must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      op(i, j) = complex_entry(row[static_cast<std::size_t>(j)], where);
    }
  }
  return op;
}

json operator_to(const Operator& op) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < op.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < op.cols(); ++j) row.push_back({op(i, j).real(), op(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Povm povm_from(const json& v, std::string_view where) {
  if (!v.is_array()) throw ConfigError(std::string(where) + ": expected an array of outcomes");
  Povm p;
  for (const json& o : v) {
    require_keys(o, where, {"label", "value", "weight", "effect"});
    PovmOutcome out;
    out.label = text(field(o, where, "label"), where);
    out.value = number(field(o, where, "value"), where);
    out.weight = o.contains("weight") ? number(o["weight"], where) : 1.0;
    out.effect = operator_from(field(o, where, "effect"), std::string(where) + "." + out.label);
    p.outcomes.push_back(std::move(out));
  }
  return p;
}

json povm_to(const Povm& p) {
  json out = json::array();
  for (const auto& o : p.outcomes) {
    out.push_back({{"label", o.label},
                   {"value", o.value},
                   {"weight", o.weight},
                   {"effect", operator_to(o.effect)}});
  }
  return out;
}

CouplingProfile coupling_from(const json& v) {
  constexpr std::string_view where = "coupling";
  require_keys(v, where, {"tau", "lambda", "shape", "begin", "end", "n_t", "samples"});
  const double tau = number(field(v, where, "tau"), where);
  const double lambda = number(field(v, where, "lambda"), where);
  CouplingProfile::Shape shape = CouplingProfile::Shape::samples;
  if (v.contains("shape")) {
    try {
      shape = shape_from_string(text(v["shape"], where));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("coupling: ") + e.what());
    }
  }
  const double begin = v.contains("begin") ? number(v["begin"], where) : 0.0;
  const double end = v.contains("end") ? number(v["end"], where) : tau;

  if (v.contains("samples")) {
    const json& arr = v["samples"];
    if (!arr.is_array() || arr.empty()) throw ConfigError("coupling: samples must be a non-empty array");
    std::vector<double> samples;
    for (const json& g : arr) samples.push_back(number(g, "coupling.samples"));
    if (v.contains("n_t") && positive_index(v["n_t"], "coupling.n_t") !=
                                 static_cast<Eigen::Index>(samples.size())) {
      throw ConfigError("coupling: n_t disagrees with the number of samples");
    }
    CouplingProfile p = CouplingProfile::from_samples(tau, lambda, std::move(samples));
    p.shape = shape;
    p.begin = begin;
    p.end = end;
    return p;
  }

  if (shape == CouplingProfile::Shape::samples) {
    throw ConfigError("coupling: either samples or an analytic shape is required");
  }
  const auto n_t = static_cast<std::size_t>(positive_index(field(v, where, "n_t"), "coupling.n_t"));
  try {
    switch (shape) {
      case CouplingProfile::Shape::boxcar: return CouplingProfile::boxcar(tau, n_t, lambda, begin, end);
      case CouplingProfile::Shape::delta: return CouplingProfile::delta(tau, n_t, lambda);
      case CouplingProfile::Shape::sin2: return CouplingProfile::sin2(tau, n_t, lambda, begin, end);
      case CouplingProfile::Shape::samples: break;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("coupling: unsupported shape");
}

json coupling_to(const CouplingProfile& c) {
  return {{"tau", c.tau},
          {"lambda", c.lambda},
          {"shape", std::string(to_string(c.shape))},
          {"begin", c.begin},
          {"end", c.end},
          {"n_t", c.samples.size()},
          {"samples", c.samples}};
}

Scenario preset_reference(const json& doc) {
  require_keys(doc, "scenario", {"schema", "preset", "params", "name"});
  PresetParams params;
  if (doc.contains("params")) {
    const json& p = doc["params"];
    if (!p.is_object()) throw ConfigError("params: expected an object");
    for (const auto& [key, value] : p.items()) params[key] = number(value, "params." + key);
  }
  try {
    Scenario s = preset(text(doc["preset"], "preset"), params);
    if (doc.contains("name")) s.name = text(doc["name"], "name");
    return s;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["schema"] = std::string(kScenarioSchema);
  doc["name"] = s.name;
  doc["dim_s"] = s.dim_s;
  doc["dim_d"] = s.dim_d;
  doc["h_s"] = operator_to(s.h_s);
  doc["h_d"] = operator_to(s.h_d);
  doc["a_obs"] = operator_to(s.a_obs);
  doc["x_obs"] = operator_to(s.x_obs);
  doc["rho_i"] = operator_to(s.rho_i.op);
  doc["rho_0"] = operator_to(s.rho_0.op);
  doc["sys_povm"] = povm_to(s.sys_povm);
  doc["det_povm"] = povm_to(s.det_povm);
  doc["coupling"] = coupling_to(s.coupling);
  doc["completeness_tol"] = s.completeness_tol;
  doc["metadata"] = s.metadata;
  return doc;
}

}  // namespace

Scenario parse_scenario(std::string_view input) {
  json doc;
  try {
    doc = json::parse(input.begin(), input.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario: expected an object");
  const std::string schema = text(field(doc, "scenario", "schema"), "schema");
  if (schema != kScenarioSchema) {
    throw ConfigError("scenario: unsupported schema '" + schema + "', expected '" +
                      std::string(kScenarioSchema) + "'");
  }
  if (doc.contains("preset")) return preset_reference(doc);

  require_keys(doc, "scenario",
               {"schema", "name", "dim_s", "dim_d", "h_s", "h_d", "a_obs", "x_obs", "rho_i",
                "rho_0", "sys_povm", "det_povm", "coupling", "completeness_tol", "metadata"});
  Scenario s;
  s.name = doc.contains("name") ? text(doc["name"], "name") : "custom";
  s.dim_s = positive_index(field(doc, "scenario", "dim_s"), "dim_s");
  s.dim_d = positive_index(field(doc, "scenario", "dim_d"), "dim_d");
  s.h_s = operator_from(field(doc, "scenario", "h_s"), "h_s");
  s.h_d = operator_from(field(doc, "scenario", "h_d"), "h_d");
  s.a_obs = operator_from(field(doc, "scenario", "a_obs"), "a_obs");
  s.x_obs = operator_from(field(doc, "scenario", "x_obs"), "x_obs");
  s.rho_i.op = operator_from(field(doc, "scenario", "rho_i"), "rho_i");
  s.rho_0.op = operator_from(field(doc, "scenario", "rho_0"), "rho_0");
  s.sys_povm = povm_from(field(doc, "scenario", "sys_povm"), "sys_povm");
  s.det_povm = povm_from(field(doc, "scenario", "det_povm"), "det_povm");
  s.coupling = coupling_from(field(doc, "scenario", "coupling"));
  if (doc.contains("completeness_tol")) {
    s.completeness_tol = number(doc["completeness_tol"], "completeness_tol");
  }
  if (doc.contains("metadata")) {
    const json& m = doc["metadata"];
    if (!m.is_object()) throw ConfigError("metadata: expected an object of strings");
    for (const auto& [key, value] : m.items()) s.metadata[key] = text(value, "metadata." + key);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string emit_scenario(const Scenario& s, int indent) { return scenario_to_json(s).dump(indent); }

std::uint64_t scenario_hash(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : scenario_to_json(s).dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string scenario_hash_hex(const Scenario& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(scenario_hash(s)));
  return buf;
}

}  // namespace wmkubo
