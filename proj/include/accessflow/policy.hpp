#ifndef ACCESSFLOW_POLICY_HPP
#define ACCESSFLOW_POLICY_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "accessflow/assignment.hpp"
#include "accessflow/config.hpp"
#include "accessflow/geo.hpp"
#include "accessflow/metrics.hpp"
#include "accessflow/parallel.hpp"

namespace accessflow {

class InvalidGrid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::uint64_t realization_seed(std::uint64_t base_seed, int r);

struct ScenarioResult {
  std::vector<DemandGroup> groups;
  std::vector<std::vector<bool>> acceptance;            // per realization
  std::vector<AssignmentSolution> solutions;            // per realization
  std::vector<std::vector<AccessMeasures>> measures;    // per realization
  std::vector<AccessMeasures> mean_measures;
  std::vector<DiffResult> diffs;
};

/// Monte-Carlo run over acceptance realizations r = 0..n_realizations-1 with
/// seed_r = realization_seed(base_seed, r). Results are ordered by r whatever
/// the thread count.
ScenarioResult run_scenario(const Dataset& data, const ScenarioConfig& config, int threads = 0);

struct SweepStat {
  std::optional<double> mean;  // over realizations with a value
  double std = 0.0;            // sample std over the same realizations
};

struct SweepResult {
  Lever lever = Lever::acceptance_scale;
  double value = 0.0;
  /// [program][measure] statewide statistics across realizations.
  std::array<std::array<SweepStat, 3>, 2> stats{};
  double closures = 0.0;  // mean closed sites per realization
};

/// Statewide means and realization spread of one scenario.
SweepResult summarize_scenario(const ScenarioResult& result, Lever lever, double value);

/// One run_scenario per grid value with everything else from `config`.
/// Seeds are shared across grid points. `on_point`, when given, sees each
/// point's full result before it is discarded.
/// Throws InvalidGrid for an empty, unsorted or out-of-range grid.
std::vector<SweepResult> run_sweep(
    const Dataset& data, const ScenarioConfig& config, Lever lever,
    const std::vector<double>& grid, int threads = 0,
    const std::function<void(std::size_t, const ScenarioResult&)>& on_point = {});

/// Greedy relocation: the k open sites with the lowest load (ties by site id)
/// move to the centroids of the k tracts with the most uncovered population,
/// sum over programs of population * (1 - coverage), ties by tract id.
/// Only tracts with uncovered population take a site, so fewer than k may
/// move. Moved sites keep id, type and capacity and join the target tract's
/// county. `measures` come from compute_measures on the same solution.
Dataset relocate_physicians(const Dataset& data, const AssignmentSolution& solution,
                            const std::vector<AccessMeasures>& measures, int k);

}  // namespace accessflow

#endif  // ACCESSFLOW_POLICY_HPP
