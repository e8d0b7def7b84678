#ifndef ACCESSFLOW_METRICS_HPP
#define ACCESSFLOW_METRICS_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "accessflow/assignment.hpp"
#include "accessflow/geo.hpp"

namespace accessflow {

/// Accessibility of one tract for one program. Travel cost and congestion are
/// empty (MISSING) exactly when nothing was assigned.
struct AccessMeasures {
  std::size_t tract = 0;
  Program program = Program::medicaid;
  double population = 0.0;
  double assigned = 0.0;
  double coverage = 0.0;
  bool coverage_vacuous = false;  // zero population; coverage reported as 1
  double assigned_fraction = 0.0;
  std::optional<double> travel_cost;
  std::optional<double> congestion;
};

enum class Measure { coverage = 0, travel_cost = 1, congestion = 2 };
inline constexpr std::array<Measure, 3> kMeasures = {Measure::coverage, Measure::travel_cost,
                                                     Measure::congestion};
const char* to_string(Measure m);
Measure parse_measure(const std::string& name);  // throws std::invalid_argument

/// Value of a measure; empty for MISSING (and for vacuous coverage).
std::optional<double> value_of(const AccessMeasures& m, Measure which);

struct CoverageValue {
  double value = 1.0;
  bool vacuous = true;
};

/// Population-weighted share of the tract-program population whose demand
/// group has at least one eligible edge. Capacity plays no role.
CoverageValue coverage(std::span<const DemandGroup> groups, std::span<const Edge> edges,
                       std::size_t tract, Program program);

/// Flow-weighted mean distance of the tract-program's assigned flow.
std::optional<double> travel_cost(const AssignmentSolution& solution,
                                  std::span<const DemandGroup> groups, std::size_t tract,
                                  Program program);

/// Flow-weighted mean utilization load_j / C_j over the tract-program's assigned flow.
std::optional<double> congestion(const AssignmentSolution& solution,
                                 std::span<const DemandGroup> groups,
                                 std::span<const PhysicianSite> sites, std::size_t tract,
                                 Program program);

/// Measures for every tract, ordered (tract 0 medicaid, tract 0 other, tract 1 medicaid, ...).
std::vector<AccessMeasures> compute_measures(const Dataset& data,
                                             std::span<const DemandGroup> groups,
                                             std::span<const Edge> edges,
                                             const AssignmentSolution& solution);

/// Per-entry mean across realizations; MISSING values are skipped and a
/// measure missing in every realization stays MISSING.
std::vector<AccessMeasures> average_measures(
    const std::vector<std::vector<AccessMeasures>>& realizations);

struct DiffResult {
  std::size_t tract = 0;
  Measure measure = Measure::coverage;
  double mean_diff = 0.0;  // medicaid - other
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool significant = false;
  bool insufficient = false;  // fewer than kMinUsableRealizations usable
  int n_used = 0;
};

inline constexpr int kMinUsableRealizations = 10;

/// Medicaid-minus-other differences per tract and measure across acceptance
/// realizations, with 2.5/97.5 percentile intervals (linear interpolation),
/// widened if needed to contain the sample mean. Realizations where either
/// side is MISSING are dropped for that tract-measure.
std::vector<DiffResult> compare_populations(
    const std::vector<std::vector<AccessMeasures>>& realizations);

struct ProgramSummary {
  double coverage = 0.0;
  double assigned_fraction = 0.0;
  std::optional<double> travel_cost;  // weighted by assigned population
  std::optional<double> congestion;   // weighted by assigned population
  double population = 0.0;
  double assigned = 0.0;
};

struct TractFlags {
  bool coverage = false;    // strictly higher than statewide mean
  bool travel_cost = false; // strictly lower
  bool congestion = false;  // strictly lower
};

struct StatewideSummary {
  std::array<ProgramSummary, 2> programs;  // indexed by Program
  std::vector<TractFlags> flags;           // parallel to the input measures
};

StatewideSummary statewide_summary(std::span<const AccessMeasures> measures);

struct QuadrantTable {
  /// Cell index = 4 * coverage_high + 2 * travel_high + congestion_high.
  std::array<std::size_t, 8> counts{};
  std::size_t excluded = 0;
  double coverage_median = 0.0;
  double travel_median = 0.0;
  double congestion_median = 0.0;

  static int cell(bool coverage_high, bool travel_high, bool congestion_high) {
    return 4 * coverage_high + 2 * travel_high + congestion_high;
  }
  std::size_t total() const;
};

/// Splits the program's tracts at population-weighted medians of coverage,
/// travel cost and congestion (values equal to the median count as low) and
/// counts the eight cells. Tracts with a MISSING measure are excluded.
QuadrantTable quadrant_occupancy(std::span<const AccessMeasures> measures, Program program);

/// Smallest value whose cumulative weight reaches half the total weight.
/// Falls back to unit weights when all weights are zero.
double weighted_median(std::span<const double> values, std::span<const double> weights);

}  // namespace accessflow

#endif  // ACCESSFLOW_METRICS_HPP
