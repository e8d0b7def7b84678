#include "accessflow/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "accessflow/network_simplex.hpp"
#include "accessflow/rng.hpp"

namespace accessflow {

FlowNetwork build_network(std::span<const DemandGroup> groups,
                          std::span<const PhysicianSite> sites, std::span<const Edge> edges,
                          std::span<const double> caps, const SolverParams& params,
                          const std::vector<bool>& open) {
  if (params.segments < 1) throw std::invalid_argument("build_network: segments must be >= 1");
  if (params.congestion_weight < 0.0) {
    throw std::invalid_argument("build_network: congestion weight must be >= 0");
  }
  if (caps.size() != sites.size()) throw std::invalid_argument("build_network: caps size mismatch");
  for (std::size_t j = 0; j < caps.size(); ++j) {
    if (!(caps[j] >= 0.0 && caps[j] <= 1.0)) {
      throw InvalidCap(j, "medicaid cap of site '" + sites[j].id + "' outside [0,1]");
    }
  }

  FlowNetwork net;
  net.groups.assign(groups.begin(), groups.end());
  net.congestion_weight = params.congestion_weight;
  net.segments = params.segments;
  net.open = open.empty() ? std::vector<bool>(sites.size(), true) : open;
  for (const auto& s : sites) {
    net.site_ids.push_back(s.id);
    net.capacity.push_back(s.capacity);
  }
  net.medicaid_cap.assign(caps.begin(), caps.end());

  const int group_base = 2;
  const int site_base = group_base + static_cast<int>(groups.size());
  int next_node = site_base + static_cast<int>(sites.size());
  std::vector<int> medicaid_node(sites.size(), -1);

  for (std::size_t g = 0; g < groups.size(); ++g) {
    net.total_supply += groups[g].population;
    net.arcs.push_back({FlowNetwork::kSource, group_base + static_cast<int>(g),
                        groups[g].population, 0.0, FlowNetwork::ArcKind::supply, g});
  }
  for (const auto& e : edges) {
    if (!net.open[e.site]) continue;
    const auto& g = groups[e.group];
    int head = site_base + static_cast<int>(e.site);
    if (g.program == Program::medicaid) {
      if (medicaid_node[e.site] < 0) medicaid_node[e.site] = next_node++;
      head = medicaid_node[e.site];
    }
    net.arcs.push_back({group_base + static_cast<int>(e.group), head, g.population, e.distance,
                        FlowNetwork::ArcKind::edge, net.edges.size()});
    net.edges.push_back(e);
  }
  for (std::size_t j = 0; j < sites.size(); ++j) {
    if (!net.open[j]) continue;
    const int site_node = site_base + static_cast<int>(j);
    if (medicaid_node[j] >= 0) {
      net.arcs.push_back({medicaid_node[j], site_node, caps[j] * sites[j].capacity, 0.0,
                          FlowNetwork::ArcKind::medicaid_cap, j});
    }
    const double width = sites[j].capacity / params.segments;
    for (int k = 1; k <= params.segments; ++k) {
      const double unit = params.congestion_weight * (2.0 * k - 1.0) / params.segments;
      net.arcs.push_back({site_node, FlowNetwork::kSink, width, unit,
                          FlowNetwork::ArcKind::congestion, j});
    }
  }
  net.node_count = next_node;
  return net;
}

double congestion_cost(double load, double capacity, double congestion_weight, int segments) {
  const double width = capacity / segments;
  double cost = 0.0;
  for (int k = 1; k <= segments; ++k) {
    const double fill = std::clamp(load - (k - 1) * width, 0.0, width);
    cost += congestion_weight * (2.0 * k - 1.0) / segments * fill;
  }
  return cost;
}

std::vector<std::size_t> AssignmentSolution::closed_sites() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < closed.size(); ++j) {
    if (closed[j]) out.push_back(j);
  }
  return out;
}

namespace {

void recompute_totals(AssignmentSolution& sol, const FlowNetwork& net) {
  const std::size_t n_sites = net.capacity.size();
  sol.loads.assign(n_sites, 0.0);
  sol.medicaid_loads.assign(n_sites, 0.0);
  sol.assigned.assign(net.groups.size(), 0.0);
  sol.travel_cost = 0.0;
  for (const auto& f : sol.flows) {
    sol.loads[f.site] += f.flow;
    if (net.groups[f.group].program == Program::medicaid) sol.medicaid_loads[f.site] += f.flow;
    sol.assigned[f.group] += f.flow;
    sol.travel_cost += f.flow * f.distance;
  }
  sol.congestion_cost = 0.0;
  for (std::size_t j = 0; j < n_sites; ++j) {
    if (sol.loads[j] > 0.0) {
      sol.congestion_cost +=
          congestion_cost(sol.loads[j], net.capacity[j], net.congestion_weight, net.segments);
    }
  }
  sol.objective = sol.travel_cost + sol.congestion_cost;
  sol.total_assigned = std::accumulate(sol.assigned.begin(), sol.assigned.end(), 0.0);
}

// Pools the flow of interchangeable groups (same tract, same edge list) and
// shares it in proportion to population. Site loads and cost are unchanged;
// only Medicaid loads move, so each pooling is kept only if caps still hold.
void share_interchangeable(AssignmentSolution& sol, const FlowNetwork& net, double tol) {
  const std::size_t n_groups = net.groups.size();
  std::vector<std::size_t> edge_begin(n_groups + 1, 0);
  for (const auto& e : net.edges) ++edge_begin[e.group + 1];
  for (std::size_t g = 0; g < n_groups; ++g) edge_begin[g + 1] += edge_begin[g];

  auto same_edges = [&](std::size_t a, std::size_t b) {
    const std::size_t na = edge_begin[a + 1] - edge_begin[a];
    if (na == 0 || na != edge_begin[b + 1] - edge_begin[b]) return false;
    for (std::size_t i = 0; i < na; ++i) {
      const auto& ea = net.edges[edge_begin[a] + i];
      const auto& eb = net.edges[edge_begin[b] + i];
      if (ea.site != eb.site || ea.distance != eb.distance) return false;
    }
    return true;
  };

  // Flows indexed by group for in-place rewriting.
  std::vector<std::map<std::size_t, FlowEntry>> by_group(n_groups);
  for (const auto& f : sol.flows) by_group[f.group][f.site] = f;

  bool changed = false;
  std::size_t g = 0;
  while (g < n_groups) {
    std::size_t end = g + 1;
    while (end < n_groups && net.groups[end].tract == net.groups[g].tract) ++end;
    std::vector<bool> used(end - g, false);
    for (std::size_t a = g; a < end; ++a) {
      if (used[a - g]) continue;
      std::vector<std::size_t> cls{a};
      for (std::size_t b = a + 1; b < end; ++b) {
        if (!used[b - g] && same_edges(a, b)) {
          cls.push_back(b);
          used[b - g] = true;
        }
      }
      if (cls.size() < 2) continue;
      double pop = 0.0;
      std::map<std::size_t, double> pooled;
      for (auto c : cls) {
        pop += net.groups[c].population;
        for (const auto& [site, f] : by_group[c]) pooled[site] += f.flow;
      }
      if (pop <= 0.0) continue;
      // Medicaid-load change per site, checked against caps.
      std::map<std::size_t, double> med_delta;
      for (const auto& [site, total] : pooled) {
        double before = 0.0;
        double after = 0.0;
        for (auto c : cls) {
          if (net.groups[c].program != Program::medicaid) continue;
          const auto it = by_group[c].find(site);
          if (it != by_group[c].end()) before += it->second.flow;
          after += total * (net.groups[c].population / pop);
        }
        med_delta[site] = after - before;
      }
      bool ok = true;
      for (const auto& [site, d] : med_delta) {
        if (sol.medicaid_loads[site] + d > net.medicaid_cap[site] * net.capacity[site] + tol) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (const auto& [site, d] : med_delta) sol.medicaid_loads[site] += d;
      for (auto c : cls) {
        const double share = net.groups[c].population / pop;
        by_group[c].clear();
        for (std::size_t i = edge_begin[c]; i < edge_begin[c + 1]; ++i) {
          const auto& e = net.edges[i];
          const auto it = pooled.find(e.site);
          if (it == pooled.end()) continue;
          const double f = it->second * share;
          if (f > 0.0) by_group[c][e.site] = {c, e.site, f, e.distance};
        }
      }
      changed = true;
    }
    g = end;
  }
  if (!changed) return;

  // Rebuild in canonical edge order.
  sol.flows.clear();
  for (const auto& e : net.edges) {
    const auto& m = by_group[e.group];
    const auto it = m.find(e.site);
    if (it != m.end()) sol.flows.push_back(it->second);
  }
}

}  // namespace

AssignmentSolution solve(const FlowNetwork& net, const SolverParams& params) {
  NetworkSimplex ns(net.node_count);
  for (const auto& a : net.arcs) ns.add_arc(a.tail, a.head, a.capacity, 0.0);
  const int ret = ns.add_arc(FlowNetwork::kSink, FlowNetwork::kSource, net.total_supply, -1.0);

  auto fail = [&](const char* phase) {
    std::ostringstream msg;
    msg << "network simplex hit its pivot limit in " << phase << " (nodes=" << net.node_count
        << ", arcs=" << net.arcs.size() << ", pivots=" << ns.pivots() << ")";
    throw SolverError(msg.str());
  };

  // Phase 1: maximum assignable population.
  if (ns.run() != NetworkSimplex::Status::optimal) fail("phase 1");
  const double f_star = ns.flow(ret);

  // Phase 2: cheapest assignment at that level.
  for (std::size_t i = 0; i < net.arcs.size(); ++i) ns.set_cost(static_cast<int>(i), net.arcs[i].cost);
  ns.set_cost(ret, 0.0);
  ns.set_bounds(ret, f_star, f_star);
  if (ns.run() != NetworkSimplex::Status::optimal) fail("phase 2");

  AssignmentSolution sol;
  sol.closed.assign(net.capacity.size(), false);
  for (std::size_t j = 0; j < net.open.size(); ++j) sol.closed[j] = !net.open[j];
  sol.iterations = 1;
  sol.pivots = ns.pivots();

  const double drop = 1e-12 * std::max(1.0, net.total_supply);
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const auto& a = net.arcs[i];
    if (a.kind != FlowNetwork::ArcKind::edge) continue;
    const double f = std::clamp(ns.flow(static_cast<int>(i)), 0.0, a.capacity);
    if (f <= drop) continue;
    const auto& e = net.edges[a.ref];
    sol.flows.push_back({e.group, e.site, f, e.distance});
  }
  recompute_totals(sol, net);
  share_interchangeable(sol, net, params.tolerance);
  recompute_totals(sol, net);
  return sol;
}

namespace {

struct ClosureRun {
  std::vector<bool> open;
  AssignmentSolution solution;
  int solves = 0;
};

// Solve, close the weakest site below the threshold, repeat.
ClosureRun close_to_fixed_point(std::span<const DemandGroup> groups,
                                std::span<const PhysicianSite> sites, std::span<const Edge> edges,
                                std::span<const double> caps, const SolverParams& params,
                                std::vector<bool> open) {
  ClosureRun run;
  while (true) {
    ++run.solves;
    const FlowNetwork net = build_network(groups, sites, edges, caps, params, open);
    AssignmentSolution sol = solve(net, params);
    std::size_t weakest = sites.size();
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (!open[j] || !(sol.loads[j] < params.min_panel - params.tolerance)) continue;
      if (weakest == sites.size() || sol.loads[j] < sol.loads[weakest] ||
          (sol.loads[j] == sol.loads[weakest] && sites[j].id < sites[weakest].id)) {
        weakest = j;
      }
    }
    if (weakest == sites.size()) {
      run.open = std::move(open);
      run.solution = std::move(sol);
      return run;
    }
    // Unused sites can all go at once: dropping them keeps the optimum.
    if (sol.loads[weakest] <= params.tolerance) {
      for (std::size_t j = 0; j < sites.size(); ++j) {
        if (open[j] && sol.loads[j] <= params.tolerance) open[j] = false;
      }
    }
    open[weakest] = false;
  }
}

// Lexicographic comparison: more assigned population, then lower objective.
bool better(const AssignmentSolution& a, const AssignmentSolution& b, double tol) {
  const double scale = std::max(1.0, std::max(a.total_assigned, b.total_assigned));
  if (a.total_assigned > b.total_assigned + tol * scale) return true;
  if (a.total_assigned < b.total_assigned - tol * scale) return false;
  const double oscale = std::max(1.0, std::max(std::abs(a.objective), std::abs(b.objective)));
  return a.objective < b.objective - tol * oscale;
}

}  // namespace

AssignmentSolution enforce_min_panel(std::span<const DemandGroup> groups,
                                     std::span<const PhysicianSite> sites,
                                     std::span<const Edge> edges, std::span<const double> caps,
                                     const SolverParams& params) {
  if (!(params.min_panel >= 0.0)) throw std::invalid_argument("enforce_min_panel: P_min must be >= 0");
  ClosureRun best = close_to_fixed_point(groups, sites, edges, caps, params,
                                         std::vector<bool>(sites.size(), true));
  int solves = best.solves;
  if (params.min_panel <= 0.0) {
    best.solution.iterations = solves;
    return std::move(best.solution);
  }
  const int budget = solves + params.search_budget;
  auto consider = [&](std::vector<bool> start) {
    if (solves >= budget) return false;
    ClosureRun cand = close_to_fixed_point(groups, sites, edges, caps, params, std::move(start));
    solves += cand.solves;
    if (better(cand.solution, best.solution, params.tolerance)) {
      best = std::move(cand);
      return true;
    }
    return false;
  };

  // Multi-start: the closure run from the full set with one site held out.
  for (std::size_t j = 0; j < sites.size() && solves < budget; ++j) {
    std::vector<bool> start(sites.size(), true);
    start[j] = false;
    consider(std::move(start));
  }

  // Add / drop / swap local search around the incumbent.
  bool improved = true;
  while (improved && solves < budget) {
    improved = false;
    for (std::size_t a = 0; a < sites.size() && !improved && solves < budget; ++a) {
      for (std::size_t b = a; b < sites.size() && !improved && solves < budget; ++b) {
        std::vector<bool> start = best.open;
        start[a] = !start[a];
        if (b != a) start[b] = !start[b];
        improved = consider(std::move(start));
      }
    }
  }
  best.solution.iterations = solves;
  return std::move(best.solution);
}

AssignmentSolution enforce_min_panel(const Dataset& data, const SolverParams& params,
                                     std::span<const double> caps,
                                     const std::vector<bool>& acceptance, double mobility_scale,
                                     const TravelRadii& radii) {
  const auto groups = build_demand(data, mobility_scale, radii);
  const auto edges = eligible_edges(groups, data, acceptance);
  return enforce_min_panel(groups, data.sites(), edges, caps, params);
}

std::vector<bool> realize_acceptance(const Dataset& data, std::uint64_t seed,
                                     double acceptance_scale) {
  const auto& sites = data.sites();
  std::map<std::string, std::vector<std::size_t>> by_county;
  for (std::size_t j = 0; j < sites.size(); ++j) by_county[sites[j].county_id].push_back(j);

  std::vector<bool> accept(sites.size(), false);
  Rng rng(seed);
  for (auto& [county_id, members] : by_county) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return sites[a].id < sites[b].id; });
    const double rate = std::min(1.0, data.county(county_id).acceptance_rate * acceptance_scale);
    const auto n_accept = static_cast<std::size_t>(std::round(rate * members.size()));
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t i = 0; i < n_accept && i < members.size(); ++i) accept[members[i]] = true;
  }
  return accept;
}

double CaseloadBase::of(SiteType t) const {
  switch (t) {
    case SiteType::public_hospital: return public_hospital;
    case SiteType::community_clinic: return community_clinic;
    case SiteType::private_office: return private_office;
  }
  return private_office;
}

std::vector<double> caseload_caps(std::span<const PhysicianSite> sites, const CaseloadBase& base,
                                  double caseload_scale) {
  if (!(caseload_scale >= 0.0)) throw std::invalid_argument("caseload_caps: scale must be >= 0");
  std::vector<double> caps;
  caps.reserve(sites.size());
  for (const auto& s : sites) caps.push_back(std::min(1.0, base.of(s.site_type) * caseload_scale));
  return caps;
}

}  // namespace accessflow
