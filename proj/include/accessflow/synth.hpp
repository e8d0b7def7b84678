#ifndef ACCESSFLOW_SYNTH_HPP
#define ACCESSFLOW_SYNTH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "accessflow/geo.hpp"

namespace accessflow {

/// Knobs of the synthetic geography. Counties tile a Georgia-sized box in a
/// grid; tracts cluster around urban cores; physicians follow density^gamma.
struct SynthParams {
  int n_counties = 159;
  int n_tracts = 2000;
  int n_physicians = 768;
  int n_urban_cores = 4;
  int n_regions = 63;
  double density_decay = 30.0;        // miles, e-folding distance from a core
  double core_peak = 10.0;            // core density relative to the rural floor
  double gamma = 2.5;                 // supply concentration exponent, >= 1
  double medicaid_share_base = 0.30;  // share in the densest tracts
  double medicaid_share_gradient = 0.25;
  double acceptance_mean = 0.40;
  double acceptance_spread = 0.20;
  double tract_population = 200.0;    // mean children per tract
  double capacity_mean = 2500.0;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Keys are the field names above. Unknown keys throw ConfigError.
SynthParams parse_synth_params(std::istream& in);
SynthParams load_synth_params(const std::string& path);

/// Deterministic in `params` (including the seed).
Dataset generate(const SynthParams& params);

/// 159 counties, 2000 tracts, 768 physicians, 4 cores, with gamma set so that
/// about a third of counties have no physician.
SynthParams georgia_preset();

}  // namespace accessflow

#endif  // ACCESSFLOW_SYNTH_HPP
