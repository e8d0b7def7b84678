#ifndef ACCESSFLOW_TESTS_ORACLES_HPP
#define ACCESSFLOW_TESTS_ORACLES_HPP

// Reference solvers used only by the tests. None of them calls into the
// flow engine.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "accessflow/assignment.hpp"
#include "accessflow/geo.hpp"
#include "accessflow/rng.hpp"

namespace oracle {

struct Arc {
  int tail;
  int head;
  double capacity;
  double cost;
};

struct FlowResult {
  double flow = 0.0;
  double cost = 0.0;
  std::vector<double> arc_flow;
};

/// Min-cost maximum flow by successive shortest paths (Bellman-Ford).
/// Arc costs must admit no negative cycle.
FlowResult min_cost_max_flow(int nodes, const std::vector<Arc>& arcs, int source, int sink);

/// A small assignment instance in the shape the engine consumes.
struct Instance {
  std::vector<accessflow::DemandGroup> groups;
  std::vector<accessflow::PhysicianSite> sites;
  std::vector<accessflow::Edge> edges;
  std::vector<double> caps;
  accessflow::SolverParams params;
};

struct InstanceShape {
  int max_groups = 4;
  int max_sites = 3;
  int max_population = 10;
  /// Capacities are multiples of the segment count and Medicaid caps are
  /// multiples of 1/C, so the LP optimum is attained at an integer flow.
  bool integral = true;
  double edge_density = 0.8;
};

Instance random_instance(accessflow::Rng& rng, const InstanceShape& shape);

/// Objective of the K-segment linearization of mu L^2 / C, by interpolation
/// between breakpoints.
double interpolated_congestion(double load, double capacity, double mu, int segments);

struct LexValue {
  double assigned = 0.0;
  double objective = 0.0;
};

/// Exhaustive search over integer assignments (dynamic programming over
/// groups, state = per-site loads). Requires integer populations, capacities
/// and Medicaid caps.
LexValue integer_assignment(const Instance& inst);

/// Lexicographic optimum on the given open set, via successive shortest paths
/// on an independently built network. Fills per-site loads.
LexValue flow_value(const Instance& inst, const std::vector<bool>& open,
                    std::vector<double>* loads = nullptr);

struct SubsetChoice {
  unsigned mask = 0;  // bit j set = site j open
  LexValue value;
  bool found = false;
};

/// Best open set over all subsets whose optimal loads meet P_min:
/// more assigned first, then lower objective.
SubsetChoice best_open_subset(const Instance& inst);

/// Ordinary least squares by Householder QR.
Eigen::VectorXd ols(const Eigen::MatrixXd& z, const Eigen::VectorXd& y);

}  // namespace oracle

#endif  // ACCESSFLOW_TESTS_ORACLES_HPP
