#include "accessflow/config.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "csv.hpp"

namespace accessflow {

std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::set<std::string> seen;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = csv::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(n) + ": expected 'key = value'");
    }
    KeyValue kv{csv::trim(line.substr(0, eq)), csv::trim(line.substr(eq + 1)), n};
    if (kv.key.empty()) throw ConfigError("line " + std::to_string(n) + ": empty key");
    if (!seen.insert(kv.key).second) {
      throw ConfigError("line " + std::to_string(n) + ": duplicate key '" + kv.key + "'");
    }
    out.push_back(std::move(kv));
  }
  return out;
}

double parse_real(const KeyValue& kv) {
  const auto v = csv::parse_double(kv.value);
  if (!v || !std::isfinite(*v)) {
    throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' needs a number");
  }
  return *v;
}

std::int64_t parse_integer(const KeyValue& kv) {
  std::size_t pos = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(kv.value, &pos);
  } catch (...) {
    pos = 0;
  }
  if (kv.value.empty() || pos != kv.value.size()) {
    throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' needs an integer");
  }
  return v;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid config: " + what); };
  if (!(acceptance_scale >= 0.0)) fail("acceptance_scale must be >= 0");
  if (!(caseload_scale >= 0.0)) fail("caseload_scale must be >= 0");
  if (!(mobility_scale > 0.0)) fail("mobility_scale must be > 0");
  if (!(P_min >= 0.0)) fail("P_min must be >= 0");
  if (!(radii.vehicle > 0.0) || !(radii.no_vehicle > 0.0)) fail("radii must be > 0");
  if (!(mu >= 0.0)) fail("mu must be >= 0");
  if (K < 1) fail("K must be >= 1");
  for (double c : {base_caps.public_hospital, base_caps.community_clinic, base_caps.private_office}) {
    if (!(c >= 0.0 && c <= 1.0)) fail("base caps must lie in [0,1]");
  }
  if (n_realizations < 1) fail("n_realizations must be >= 1");
}

SolverParams ScenarioConfig::solver_params() const {
  SolverParams p;
  p.congestion_weight = mu;
  p.segments = K;
  p.min_panel = P_min;
  return p;
}

ScenarioConfig parse_scenario_config(std::istream& in) {
  ScenarioConfig c;
  for (const auto& kv : parse_key_values(in)) {
    const auto& k = kv.key;
    if (k == "acceptance_scale") c.acceptance_scale = parse_real(kv);
    else if (k == "caseload_scale") c.caseload_scale = parse_real(kv);
    else if (k == "mobility_scale") c.mobility_scale = parse_real(kv);
    else if (k == "P_min") c.P_min = parse_real(kv);
    else if (k == "radius_vehicle") c.radii.vehicle = parse_real(kv);
    else if (k == "radius_no_vehicle") c.radii.no_vehicle = parse_real(kv);
    else if (k == "mu") c.mu = parse_real(kv);
    else if (k == "K") c.K = static_cast<int>(parse_integer(kv));
    else if (k == "cap_public_hospital") c.base_caps.public_hospital = parse_real(kv);
    else if (k == "cap_community_clinic") c.base_caps.community_clinic = parse_real(kv);
    else if (k == "cap_private_office") c.base_caps.private_office = parse_real(kv);
    else if (k == "base_seed") {
      const auto v = parse_integer(kv);
      if (v < 0) throw ConfigError("line " + std::to_string(kv.line) + ": base_seed must be >= 0");
      c.base_seed = static_cast<std::uint64_t>(v);
    } else if (k == "n_realizations") c.n_realizations = static_cast<int>(parse_integer(kv));
    else throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + k + "'");
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_scenario_config(in);
}

std::string to_text(const ScenarioConfig& c) {
  std::ostringstream out;
  auto real = [](double v) { return csv::fmt_exact(v); };
  out << "acceptance_scale = " << real(c.acceptance_scale) << '\n'
      << "caseload_scale = " << real(c.caseload_scale) << '\n'
      << "mobility_scale = " << real(c.mobility_scale) << '\n'
      << "P_min = " << real(c.P_min) << '\n'
      << "radius_vehicle = " << real(c.radii.vehicle) << '\n'
      << "radius_no_vehicle = " << real(c.radii.no_vehicle) << '\n'
      << "mu = " << real(c.mu) << '\n'
      << "K = " << c.K << '\n'
      << "cap_public_hospital = " << real(c.base_caps.public_hospital) << '\n'
      << "cap_community_clinic = " << real(c.base_caps.community_clinic) << '\n'
      << "cap_private_office = " << real(c.base_caps.private_office) << '\n'
      << "base_seed = " << c.base_seed << '\n'
      << "n_realizations = " << c.n_realizations << '\n';
  return out.str();
}

const char* to_string(Lever lever) {
  switch (lever) {
    case Lever::acceptance_scale: return "acceptance_scale";
    case Lever::caseload_scale: return "caseload_scale";
    case Lever::mobility_scale: return "mobility_scale";
    case Lever::P_min: return "P_min";
  }
  return "acceptance_scale";
}

Lever parse_lever(const std::string& name) {
  for (Lever l : {Lever::acceptance_scale, Lever::caseload_scale, Lever::mobility_scale, Lever::P_min}) {
    if (name == to_string(l)) return l;
  }
  throw ConfigError("unknown lever '" + name + "'");
}

void set_lever(ScenarioConfig& c, Lever lever, double value) {
  switch (lever) {
    case Lever::acceptance_scale: c.acceptance_scale = value; break;
    case Lever::caseload_scale: c.caseload_scale = value; break;
    case Lever::mobility_scale: c.mobility_scale = value; break;
    case Lever::P_min: c.P_min = value; break;
  }
}

double get_lever(const ScenarioConfig& c, Lever lever) {
  switch (lever) {
    case Lever::acceptance_scale: return c.acceptance_scale;
    case Lever::caseload_scale: return c.caseload_scale;
    case Lever::mobility_scale: return c.mobility_scale;
    case Lever::P_min: return c.P_min;
  }
  return 0.0;
}

}  // namespace accessflow
