#ifndef ACCESSFLOW_ASSIGNMENT_HPP
#define ACCESSFLOW_ASSIGNMENT_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "accessflow/geo.hpp"

namespace accessflow {

struct SolverParams {
  double congestion_weight = 1.0;  // mu
  int segments = 5;                // K
  double min_panel = 0.0;          // P_min
  double tolerance = 1e-9;
  int search_budget = 40;  // extra solves allowed when improving the closed set
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Medicaid caseload fraction outside [0, 1].
class InvalidCap : public std::invalid_argument {
 public:
  InvalidCap(std::size_t site, const std::string& msg) : std::invalid_argument(msg), site_(site) {}
  std::size_t site() const { return site_; }

 private:
  std::size_t site_;
};

/// Capacitated assignment as a flow network.
///
/// Nodes: source, sink, one per demand group, one per site, plus a Medicaid
/// sub-node for each site reached by a Medicaid edge. Arcs:
///   source -> group          capacity = population
///   group  -> site           (other program), cost = distance
///   group  -> medicaid(j)    (Medicaid program), cost = distance
///   medicaid(j) -> site      capacity = cap_j * C_j
///   site -> sink             K segments of width C_j / K, unit cost mu (2k-1)/K
///
/// Filling the segments in order prices a load L at mu C (L/C)^2 on the
/// segment breakpoints.
struct FlowNetwork {
  enum class ArcKind : std::uint8_t { supply, edge, medicaid_cap, congestion };

  struct Arc {
    int tail;
    int head;
    double capacity;
    double cost;
    ArcKind kind;
    std::size_t ref;  // group (supply), edge index (edge), site (medicaid_cap, congestion)
  };

  static constexpr int kSource = 0;
  static constexpr int kSink = 1;

  int node_count = 2;
  std::vector<Arc> arcs;
  std::vector<Edge> edges;             // edges to open sites, canonical order
  std::vector<DemandGroup> groups;
  std::vector<std::string> site_ids;
  std::vector<double> capacity;        // per site
  std::vector<double> medicaid_cap;    // per site, fraction
  std::vector<bool> open;              // per site
  double total_supply = 0.0;
  double congestion_weight = 0.0;
  int segments = 1;
};

/// Builds the network over open sites. `open` may be empty (all open).
/// Throws InvalidCap if any cap lies outside [0, 1].
FlowNetwork build_network(std::span<const DemandGroup> groups,
                          std::span<const PhysicianSite> sites, std::span<const Edge> edges,
                          std::span<const double> caps, const SolverParams& params,
                          const std::vector<bool>& open = {});

/// Cost of placing `load` on a site of capacity `capacity`, priced by the
/// K-segment linearization of mu C (L/C)^2.
double congestion_cost(double load, double capacity, double congestion_weight, int segments);

struct FlowEntry {
  std::size_t group;
  std::size_t site;
  double flow;
  double distance;
};

struct AssignmentSolution {
  std::vector<FlowEntry> flows;         // positive flows, edge order
  std::vector<double> loads;            // per site
  std::vector<double> medicaid_loads;   // per site
  std::vector<double> assigned;         // per group
  std::vector<bool> closed;             // per site
  double objective = 0.0;               // travel + congestion
  double travel_cost = 0.0;             // sum flow * distance
  double congestion_cost = 0.0;
  double total_assigned = 0.0;
  int iterations = 0;
  std::int64_t pivots = 0;

  std::vector<std::size_t> closed_sites() const;
};

/// Lexicographic optimum: maximum total assigned population first, then
/// minimum travel + congestion cost at that level.
///
/// Demand groups of one tract whose edge lists coincide are interchangeable;
/// their pooled flow is shared in proportion to population whenever the
/// Medicaid caps allow it, so identical demand gets identical treatment.
AssignmentSolution solve(const FlowNetwork& network, const SolverParams& params);

/// Minimum-panel closure. A closure run repeatedly solves and closes the open
/// site with the smallest load strictly below `params.min_panel` (ties by site
/// id) until every open site meets the threshold. The run from the full site
/// set is then improved by closure runs started from the full set minus one
/// site, and by add / drop / swap moves on the open set, keeping the
/// lexicographically best result (more assigned, then lower objective).
/// The improvement phase spends at most `params.search_budget` extra solves.
/// `iterations` on the result counts every solve performed.
AssignmentSolution enforce_min_panel(std::span<const DemandGroup> groups,
                                     std::span<const PhysicianSite> sites,
                                     std::span<const Edge> edges, std::span<const double> caps,
                                     const SolverParams& params);

/// Convenience overload: builds demand and edges from a dataset first.
AssignmentSolution enforce_min_panel(const Dataset& data, const SolverParams& params,
                                     std::span<const double> caps,
                                     const std::vector<bool>& acceptance,
                                     double mobility_scale = 1.0, const TravelRadii& radii = {});

/// Within each county, exactly round(min(1, rate * acceptance_scale) * n) of
/// its n sites accept Medicaid; the subset comes from a seeded shuffle.
std::vector<bool> realize_acceptance(const Dataset& data, std::uint64_t seed,
                                     double acceptance_scale = 1.0);

/// Default Medicaid caseload fractions by practice type.
struct CaseloadBase {
  double public_hospital = 1.0;
  double community_clinic = 0.75;
  double private_office = 0.30;

  double of(SiteType t) const;
};

/// cap_j = min(1, base[type_j] * scale).
std::vector<double> caseload_caps(std::span<const PhysicianSite> sites, const CaseloadBase& base,
                                  double caseload_scale);

}  // namespace accessflow

#endif  // ACCESSFLOW_ASSIGNMENT_HPP
