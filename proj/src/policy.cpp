#include "accessflow/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "accessflow/rng.hpp"

namespace accessflow {

std::uint64_t realization_seed(std::uint64_t base_seed, int r) {
  return derive_seed(base_seed, static_cast<std::uint64_t>(r));
}

ScenarioResult run_scenario(const Dataset& data, const ScenarioConfig& config, int threads) {
  config.validate();
  ScenarioResult res;
  res.groups = build_demand(data, config.mobility_scale, config.radii);
  double max_radius = 0.0;
  for (const auto& g : res.groups) max_radius = std::max(max_radius, g.radius);
  const CatchmentIndex index(data, max_radius);
  const auto caps = caseload_caps(data.sites(), config.base_caps, config.caseload_scale);
  const SolverParams params = config.solver_params();

  const auto n = static_cast<std::size_t>(config.n_realizations);
  res.acceptance.resize(n);
  res.solutions.resize(n);
  res.measures.resize(n);
  parallel_for(n, threads, [&](std::size_t r) {
    auto accept = realize_acceptance(data, realization_seed(config.base_seed, static_cast<int>(r)),
                                     config.acceptance_scale);
    const auto edges = eligible_edges(res.groups, accept, index);
    auto sol = enforce_min_panel(res.groups, data.sites(), edges, caps, params);
    res.measures[r] = compute_measures(data, res.groups, edges, sol);
    res.solutions[r] = std::move(sol);
    res.acceptance[r] = std::move(accept);
  });

  res.mean_measures = average_measures(res.measures);
  res.diffs = compare_populations(res.measures);
  return res;
}

SweepResult summarize_scenario(const ScenarioResult& result, Lever lever, double value) {
  SweepResult row;
  row.lever = lever;
  row.value = value;
  std::array<std::array<std::vector<double>, 3>, 2> samples;
  for (const auto& m : result.measures) {
    const auto s = statewide_summary(m);
    for (std::size_t p = 0; p < 2; ++p) {
      const auto& ps = s.programs[p];
      samples[p][0].push_back(ps.coverage);
      if (ps.travel_cost) samples[p][1].push_back(*ps.travel_cost);
      if (ps.congestion) samples[p][2].push_back(*ps.congestion);
    }
  }
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& v = samples[p][k];
      if (v.empty()) continue;
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      row.stats[p][k].mean = mean;
      row.stats[p][k].std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    }
  }
  double closed = 0.0;
  for (const auto& sol : result.solutions) closed += static_cast<double>(sol.closed_sites().size());
  if (!result.solutions.empty()) closed /= static_cast<double>(result.solutions.size());
  row.closures = closed;
  return row;
}

std::vector<SweepResult> run_sweep(
    const Dataset& data, const ScenarioConfig& config, Lever lever,
    const std::vector<double>& grid, int threads,
    const std::function<void(std::size_t, const ScenarioResult&)>& on_point) {
  if (grid.empty()) throw InvalidGrid("grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw InvalidGrid("grid values must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidGrid("grid must be strictly increasing");
    ScenarioConfig c = config;
    set_lever(c, lever, grid[i]);
    try {
      c.validate();
    } catch (const ConfigError& e) {
      throw InvalidGrid(std::string("grid value out of range: ") + e.what());
    }
  }

  std::vector<SweepResult> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ScenarioConfig c = config;
    set_lever(c, lever, grid[i]);
    const auto res = run_scenario(data, c, threads);
    rows.push_back(summarize_scenario(res, lever, grid[i]));
    if (on_point) on_point(i, res);
  }
  return rows;
}

Dataset relocate_physicians(const Dataset& data, const AssignmentSolution& solution,
                            const std::vector<AccessMeasures>& measures, int k) {
  if (k <= 0) return data;
  const auto& sites = data.sites();
  const auto& tracts = data.tracts();

  std::vector<std::size_t> open;
  for (std::size_t j = 0; j < sites.size(); ++j) {
    if (j >= solution.closed.size() || !solution.closed[j]) open.push_back(j);
  }
  auto load = [&](std::size_t j) { return j < solution.loads.size() ? solution.loads[j] : 0.0; };
  std::sort(open.begin(), open.end(), [&](std::size_t a, std::size_t b) {
    if (load(a) != load(b)) return load(a) < load(b);
    return sites[a].id < sites[b].id;
  });

  std::vector<double> uncovered(tracts.size(), 0.0);
  for (const auto& m : measures) {
    if (m.tract < tracts.size()) uncovered[m.tract] += m.population * (1.0 - m.coverage);
  }
  std::vector<std::size_t> targets;
  for (std::size_t t = 0; t < tracts.size(); ++t) {
    if (uncovered[t] > 0.0) targets.push_back(t);
  }
  std::sort(targets.begin(), targets.end(), [&](std::size_t a, std::size_t b) {
    if (uncovered[a] != uncovered[b]) return uncovered[a] > uncovered[b];
    return tracts[a].id < tracts[b].id;
  });

  const std::size_t moves =
      std::min({static_cast<std::size_t>(k), open.size(), targets.size()});
  auto moved = sites;
  for (std::size_t i = 0; i < moves; ++i) {
    auto& s = moved[open[i]];
    s.location = tracts[targets[i]].centroid;
    s.county_id = tracts[targets[i]].county_id;
  }
  return Dataset(tracts, std::move(moved), data.counties(), data.regions());
}

}  // namespace accessflow
