#ifndef ACCESSFLOW_CONFIG_HPP
#define ACCESSFLOW_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "accessflow/assignment.hpp"
#include "accessflow/geo.hpp"

namespace accessflow {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `key = value` lines; `#` starts a comment; blank lines ignored.
/// Duplicate keys are errors.
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};
std::vector<KeyValue> parse_key_values(std::istream& in);

double parse_real(const KeyValue& kv);
std::int64_t parse_integer(const KeyValue& kv);

/// Policy levers and solver settings for one scenario.
struct ScenarioConfig {
  double acceptance_scale = 1.0;
  double caseload_scale = 1.0;
  double mobility_scale = 1.0;
  double P_min = 0.0;
  TravelRadii radii;
  double mu = 1.0;
  int K = 5;
  CaseloadBase base_caps;
  std::uint64_t base_seed = 1;
  int n_realizations = 100;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  SolverParams solver_params() const;
};

/// Keys are the field names: acceptance_scale, caseload_scale, mobility_scale,
/// P_min, radius_vehicle, radius_no_vehicle, mu, K, cap_public_hospital,
/// cap_community_clinic, cap_private_office, base_seed, n_realizations.
/// Unknown keys are errors.
ScenarioConfig parse_scenario_config(std::istream& in);
ScenarioConfig load_scenario_config(const std::string& path);
/// Canonical text form; parse_scenario_config(to_text(c)) reproduces c.
std::string to_text(const ScenarioConfig& config);

enum class Lever { acceptance_scale, caseload_scale, mobility_scale, P_min };
const char* to_string(Lever lever);
/// Throws ConfigError for unknown names.
Lever parse_lever(const std::string& name);
void set_lever(ScenarioConfig& config, Lever lever, double value);
double get_lever(const ScenarioConfig& config, Lever lever);

}  // namespace accessflow

#endif  // ACCESSFLOW_CONFIG_HPP
