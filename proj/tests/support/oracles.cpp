#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace oracle {

using accessflow::DemandGroup;
using accessflow::Edge;
using accessflow::Program;

FlowResult min_cost_max_flow(int nodes, const std::vector<Arc>& arcs, int source, int sink) {
  struct Residual {
    int to;
    double cap;
    double cost;
    std::size_t rev;
    int arc;  // index into arcs for forward residuals, -1 otherwise
  };
  std::vector<std::vector<Residual>> g(static_cast<std::size_t>(nodes));
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const auto& e = arcs[a];
    auto& out = g[static_cast<std::size_t>(e.tail)];
    auto& in = g[static_cast<std::size_t>(e.head)];
    out.push_back({e.head, e.capacity, e.cost, in.size(), static_cast<int>(a)});
    in.push_back({e.tail, 0.0, -e.cost, out.size() - 1, -1});
  }

  FlowResult res;
  res.arc_flow.assign(arcs.size(), 0.0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (;;) {
    std::vector<double> dist(static_cast<std::size_t>(nodes), kInf);
    std::vector<int> prev_node(static_cast<std::size_t>(nodes), -1);
    std::vector<std::size_t> prev_edge(static_cast<std::size_t>(nodes), 0);
    dist[static_cast<std::size_t>(source)] = 0.0;
    for (int round = 0; round < nodes; ++round) {
      bool changed = false;
      for (int u = 0; u < nodes; ++u) {
        const double du = dist[static_cast<std::size_t>(u)];
        if (du == kInf) continue;
        const auto& adj = g[static_cast<std::size_t>(u)];
        for (std::size_t i = 0; i < adj.size(); ++i) {
          const auto& e = adj[i];
          if (e.cap > 1e-12 && du + e.cost < dist[static_cast<std::size_t>(e.to)] - 1e-12) {
            dist[static_cast<std::size_t>(e.to)] = du + e.cost;
            prev_node[static_cast<std::size_t>(e.to)] = u;
            prev_edge[static_cast<std::size_t>(e.to)] = i;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[static_cast<std::size_t>(sink)] == kInf) break;

    double push = kInf;
    for (int v = sink; v != source; v = prev_node[static_cast<std::size_t>(v)]) {
      const auto& e = g[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                       [prev_edge[static_cast<std::size_t>(v)]];
      push = std::min(push, e.cap);
    }
    for (int v = sink; v != source; v = prev_node[static_cast<std::size_t>(v)]) {
      auto& e = g[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                 [prev_edge[static_cast<std::size_t>(v)]];
      e.cap -= push;
      g[static_cast<std::size_t>(v)][e.rev].cap += push;
    }
    res.flow += push;
    res.cost += push * dist[static_cast<std::size_t>(sink)];
  }
  for (const auto& adj : g) {
    for (const auto& e : adj) {
      if (e.arc >= 0) {
        res.arc_flow[static_cast<std::size_t>(e.arc)] =
            arcs[static_cast<std::size_t>(e.arc)].capacity - e.cap;
      }
    }
  }
  return res;
}

Instance random_instance(accessflow::Rng& rng, const InstanceShape& shape) {
  Instance inst;
  const int ng = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(shape.max_groups)));
  const int ns = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(shape.max_sites)));
  inst.params.segments = 1 + static_cast<int>(rng.below(3));
  inst.params.congestion_weight = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, 5.0);
  inst.params.min_panel = 0.0;

  for (int j = 0; j < ns; ++j) {
    accessflow::PhysicianSite s;
    s.id = "S" + std::string(j < 10 ? "0" : "") + std::to_string(j);
    if (shape.integral) {
      s.capacity = inst.params.segments * (1.0 + static_cast<double>(rng.below(4)));
    } else {
      s.capacity = 1.0 + static_cast<double>(rng.below(10));
    }
    inst.sites.push_back(s);
    if (rng.uniform() < 0.3) {
      inst.caps.push_back(1.0);
    } else if (shape.integral) {
      inst.caps.push_back(static_cast<double>(rng.below(static_cast<std::uint64_t>(s.capacity) + 1)) /
                          s.capacity);
    } else {
      inst.caps.push_back(static_cast<double>(rng.below(11)) / 10.0);
    }
  }

  for (int i = 0; i < ng; ++i) {
    DemandGroup g;
    g.tract = static_cast<std::size_t>(i / 2);
    g.program = rng.below(2) ? Program::medicaid : Program::other;
    g.vehicle = rng.below(2) ? accessflow::Vehicle::yes : accessflow::Vehicle::no;
    g.population =
        1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(shape.max_population)));
    g.radius = 100.0;
    inst.groups.push_back(g);

    std::vector<Edge> es;
    for (int j = 0; j < ns; ++j) {
      if (rng.uniform() < shape.edge_density) {
        es.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                      (1.0 + static_cast<double>(rng.below(20))) / 2.0});
      }
    }
    std::sort(es.begin(), es.end(), [](const Edge& a, const Edge& b) {
      return a.distance < b.distance || (a.distance == b.distance && a.site < b.site);
    });
    inst.edges.insert(inst.edges.end(), es.begin(), es.end());
  }
  return inst;
}

double interpolated_congestion(double load, double capacity, double mu, int segments) {
  if (load <= 0.0) return 0.0;
  const double width = capacity / segments;
  auto f = [&](double l) { return mu * l * l / capacity; };
  const int k = std::min(static_cast<int>(std::floor(load / width)), segments - 1);
  const double a = k * width;
  const double b = (k + 1) * width;
  return f(a) + (load - a) * (f(b) - f(a)) / (b - a);
}

LexValue integer_assignment(const Instance& inst) {
  const std::size_t ns = inst.sites.size();
  // state: loads then Medicaid loads, padded to the maximum site count
  using State = std::array<int, 6>;
  if (ns > 3) throw std::invalid_argument("integer_assignment handles at most 3 sites");
  std::vector<int> cap(ns), medcap(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    cap[j] = static_cast<int>(std::lround(inst.sites[j].capacity));
    medcap[j] = static_cast<int>(std::floor(inst.caps[j] * inst.sites[j].capacity + 1e-9));
  }

  std::map<State, double> states{{State{}, 0.0}};
  for (std::size_t gi = 0; gi < inst.groups.size(); ++gi) {
    const auto& grp = inst.groups[gi];
    const bool medicaid = grp.program == Program::medicaid;
    std::vector<Edge> es;
    for (const auto& e : inst.edges) {
      if (e.group == gi) es.push_back(e);
    }
    const int pop = static_cast<int>(std::lround(grp.population));

    std::map<State, double> next;
    for (const auto& [state, travel] : states) {
      // enumerate integer splits of at most `pop` units over the group's edges
      std::function<void(std::size_t, int, State, double)> rec = [&](std::size_t idx, int left,
                                                                    State s, double t) {
        if (idx == es.size()) {
          auto it = next.find(s);
          if (it == next.end() || t < it->second) next[s] = t;
          return;
        }
        const std::size_t j = es[idx].site;
        for (int x = 0; x <= left; ++x) {
          State s2 = s;
          s2[j] += x;
          if (s2[j] > cap[j]) break;
          if (medicaid) {
            s2[3 + j] += x;
            if (s2[3 + j] > medcap[j]) break;
          }
          rec(idx + 1, left - x, s2, t + x * es[idx].distance);
        }
      };
      rec(0, pop, state, travel);
    }
    states = std::move(next);
  }

  LexValue best{-1.0, 0.0};
  for (const auto& [s, travel] : states) {
    double assigned = 0.0;
    double obj = travel;
    for (std::size_t j = 0; j < ns; ++j) {
      assigned += s[j];
      obj += interpolated_congestion(s[j], inst.sites[j].capacity,
                                     inst.params.congestion_weight, inst.params.segments);
    }
    if (assigned > best.assigned || (assigned == best.assigned && obj < best.objective)) {
      best = {assigned, obj};
    }
  }
  return best;
}

LexValue flow_value(const Instance& inst, const std::vector<bool>& open,
                    std::vector<double>* loads) {
  const int ng = static_cast<int>(inst.groups.size());
  const int ns = static_cast<int>(inst.sites.size());
  const int site0 = 2 + ng;
  const int med0 = site0 + ns;
  std::vector<Arc> arcs;
  for (int i = 0; i < ng; ++i) {
    arcs.push_back({0, 2 + i, inst.groups[static_cast<std::size_t>(i)].population, 0.0});
  }
  for (const auto& e : inst.edges) {
    if (!open[e.site]) continue;
    const int g = 2 + static_cast<int>(e.group);
    const bool medicaid = inst.groups[e.group].program == Program::medicaid;
    const int head = (medicaid ? med0 : site0) + static_cast<int>(e.site);
    arcs.push_back({g, head, inst.groups[e.group].population, e.distance});
  }
  std::vector<std::size_t> sink_arcs_begin(static_cast<std::size_t>(ns));
  const int k = inst.params.segments;
  const double mu = inst.params.congestion_weight;
  for (int j = 0; j < ns; ++j) {
    const auto& s = inst.sites[static_cast<std::size_t>(j)];
    arcs.push_back({med0 + j, site0 + j, inst.caps[static_cast<std::size_t>(j)] * s.capacity, 0.0});
    sink_arcs_begin[static_cast<std::size_t>(j)] = arcs.size();
    for (int seg = 1; seg <= k; ++seg) {
      arcs.push_back({site0 + j, 1, open[static_cast<std::size_t>(j)] ? s.capacity / k : 0.0,
                      mu * (2.0 * seg - 1.0) / k});
    }
  }
  const FlowResult r = min_cost_max_flow(med0 + ns, arcs, 0, 1);
  if (loads) {
    loads->assign(static_cast<std::size_t>(ns), 0.0);
    for (int j = 0; j < ns; ++j) {
      for (int seg = 0; seg < k; ++seg) {
        (*loads)[static_cast<std::size_t>(j)] +=
            r.arc_flow[sink_arcs_begin[static_cast<std::size_t>(j)] + static_cast<std::size_t>(seg)];
      }
    }
  }
  return {r.flow, r.cost};
}

SubsetChoice best_open_subset(const Instance& inst) {
  const std::size_t ns = inst.sites.size();
  SubsetChoice best;
  for (unsigned mask = 0; mask < (1u << ns); ++mask) {
    std::vector<bool> open(ns);
    for (std::size_t j = 0; j < ns; ++j) open[j] = (mask >> j) & 1u;
    std::vector<double> loads;
    const LexValue v = flow_value(inst, open, &loads);
    bool feasible = true;
    for (std::size_t j = 0; j < ns; ++j) {
      if (open[j] && loads[j] < inst.params.min_panel - 1e-9) feasible = false;
    }
    if (!feasible) continue;
    if (!best.found || v.assigned > best.value.assigned + 1e-9 ||
        (std::abs(v.assigned - best.value.assigned) <= 1e-9 &&
         v.objective < best.value.objective - 1e-9)) {
      best = {mask, v, true};
    }
  }
  return best;
}

Eigen::VectorXd ols(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
  return z.householderQr().solve(y);
}

}  // namespace oracle
