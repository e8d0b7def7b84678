#include "accessflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace accessflow {

const char* to_string(Measure m) {
  switch (m) {
    case Measure::coverage: return "coverage";
    case Measure::travel_cost: return "travel_cost";
    case Measure::congestion: return "congestion";
  }
  return "coverage";
}

Measure parse_measure(const std::string& name) {
  if (name == "coverage") return Measure::coverage;
  if (name == "travel_cost") return Measure::travel_cost;
  if (name == "congestion") return Measure::congestion;
  throw std::invalid_argument("unknown measure '" + name + "'");
}

std::optional<double> value_of(const AccessMeasures& m, Measure which) {
  switch (which) {
    case Measure::coverage:
      if (m.coverage_vacuous) return std::nullopt;
      return m.coverage;
    case Measure::travel_cost: return m.travel_cost;
    case Measure::congestion: return m.congestion;
  }
  return std::nullopt;
}

CoverageValue coverage(std::span<const DemandGroup> groups, std::span<const Edge> edges,
                       std::size_t tract, Program program) {
  std::vector<bool> reached(groups.size(), false);
  for (const auto& e : edges) reached[e.group] = true;
  double total = 0.0;
  double covered = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].tract != tract || groups[g].program != program) continue;
    total += groups[g].population;
    if (reached[g]) covered += groups[g].population;
  }
  if (total <= 0.0) return {1.0, true};
  return {covered / total, false};
}

std::optional<double> travel_cost(const AssignmentSolution& solution,
                                  std::span<const DemandGroup> groups, std::size_t tract,
                                  Program program) {
  double flow = 0.0;
  double weighted = 0.0;
  for (const auto& f : solution.flows) {
    const auto& g = groups[f.group];
    if (g.tract != tract || g.program != program) continue;
    flow += f.flow;
    weighted += f.flow * f.distance;
  }
  if (flow <= 0.0) return std::nullopt;
  return weighted / flow;
}

std::optional<double> congestion(const AssignmentSolution& solution,
                                 std::span<const DemandGroup> groups,
                                 std::span<const PhysicianSite> sites, std::size_t tract,
                                 Program program) {
  double flow = 0.0;
  double weighted = 0.0;
  for (const auto& f : solution.flows) {
    const auto& g = groups[f.group];
    if (g.tract != tract || g.program != program) continue;
    flow += f.flow;
    weighted += f.flow * (solution.loads[f.site] / sites[f.site].capacity);
  }
  if (flow <= 0.0) return std::nullopt;
  return weighted / flow;
}

std::vector<AccessMeasures> compute_measures(const Dataset& data,
                                             std::span<const DemandGroup> groups,
                                             std::span<const Edge> edges,
                                             const AssignmentSolution& solution) {
  const std::size_t n_tracts = data.tracts().size();
  const auto& sites = data.sites();
  auto slot = [](std::size_t tract, Program p) {
    return 2 * tract + static_cast<std::size_t>(p);
  };

  std::vector<AccessMeasures> out(2 * n_tracts);
  for (std::size_t t = 0; t < n_tracts; ++t) {
    for (Program p : {Program::medicaid, Program::other}) {
      auto& m = out[slot(t, p)];
      m.tract = t;
      m.program = p;
      m.population = data.tracts()[t].population(p);
    }
  }

  std::vector<bool> reached(groups.size(), false);
  for (const auto& e : edges) reached[e.group] = true;
  std::vector<double> covered(out.size(), 0.0);
  std::vector<double> group_pop(out.size(), 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto s = slot(groups[g].tract, groups[g].program);
    group_pop[s] += groups[g].population;
    if (reached[g]) covered[s] += groups[g].population;
  }

  std::vector<double> flow(out.size(), 0.0);
  std::vector<double> dist(out.size(), 0.0);
  std::vector<double> util(out.size(), 0.0);
  for (const auto& f : solution.flows) {
    const auto& g = groups[f.group];
    const auto s = slot(g.tract, g.program);
    flow[s] += f.flow;
    dist[s] += f.flow * f.distance;
    util[s] += f.flow * (solution.loads[f.site] / sites[f.site].capacity);
  }

  for (std::size_t s = 0; s < out.size(); ++s) {
    auto& m = out[s];
    if (group_pop[s] > 0.0) {
      m.coverage = covered[s] / group_pop[s];
      m.coverage_vacuous = false;
    } else {
      m.coverage = 1.0;
      m.coverage_vacuous = true;
    }
    m.assigned = flow[s];
    m.assigned_fraction = m.population > 0.0 ? std::clamp(flow[s] / m.population, 0.0, 1.0) : 0.0;
    if (flow[s] > 0.0) {
      m.travel_cost = dist[s] / flow[s];
      m.congestion = util[s] / flow[s];
    }
  }
  return out;
}

std::vector<AccessMeasures> average_measures(
    const std::vector<std::vector<AccessMeasures>>& realizations) {
  if (realizations.empty()) return {};
  std::vector<AccessMeasures> out = realizations.front();
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    double cov = 0.0, frac = 0.0, assigned = 0.0, travel = 0.0, cong = 0.0;
    int n_travel = 0, n_cong = 0;
    for (const auto& r : realizations) {
      if (r.size() != n) throw std::invalid_argument("average_measures: realization size mismatch");
      cov += r[i].coverage;
      frac += r[i].assigned_fraction;
      assigned += r[i].assigned;
      if (r[i].travel_cost) {
        travel += *r[i].travel_cost;
        ++n_travel;
      }
      if (r[i].congestion) {
        cong += *r[i].congestion;
        ++n_cong;
      }
    }
    const double k = static_cast<double>(realizations.size());
    auto& m = out[i];
    m.coverage = cov / k;
    m.assigned_fraction = frac / k;
    m.assigned = assigned / k;
    m.travel_cost = n_travel > 0 ? std::optional<double>(travel / n_travel) : std::nullopt;
    m.congestion = n_cong > 0 ? std::optional<double>(cong / n_cong) : std::nullopt;
  }
  return out;
}

namespace {

// Linear-interpolation percentile of sorted data, p in [0, 1].
double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<DiffResult> compare_populations(
    const std::vector<std::vector<AccessMeasures>>& realizations) {
  std::vector<DiffResult> out;
  if (realizations.empty()) return out;
  const std::size_t n = realizations.front().size();
  for (const auto& r : realizations) {
    if (r.size() != n) throw std::invalid_argument("compare_populations: realization size mismatch");
  }

  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < n; i += 2) {
    const auto& med0 = realizations.front()[i];
    const auto& oth0 = realizations.front()[i + 1];
    if (med0.program != Program::medicaid || oth0.program != Program::other ||
        med0.tract != oth0.tract) {
      throw std::invalid_argument("compare_populations: measures must alternate medicaid/other per tract");
    }
    for (Measure which : kMeasures) {
      diffs.clear();
      for (const auto& r : realizations) {
        const auto a = value_of(r[i], which);
        const auto b = value_of(r[i + 1], which);
        if (a && b) diffs.push_back(*a - *b);
      }
      DiffResult d;
      d.tract = med0.tract;
      d.measure = which;
      d.n_used = static_cast<int>(diffs.size());
      if (!diffs.empty()) {
        // Sorting first makes every statistic independent of realization order.
        std::sort(diffs.begin(), diffs.end());
        double sum = 0.0;
        for (double v : diffs) sum += v;
        d.mean_diff = sum / static_cast<double>(diffs.size());
        d.ci_low = std::min(percentile(diffs, 0.025), d.mean_diff);
        d.ci_high = std::max(percentile(diffs, 0.975), d.mean_diff);
      }
      d.insufficient = d.n_used < kMinUsableRealizations;
      d.significant = !d.insufficient && (d.ci_low > 0.0 || d.ci_high < 0.0);
      out.push_back(d);
    }
  }
  return out;
}

StatewideSummary statewide_summary(std::span<const AccessMeasures> measures) {
  StatewideSummary s;
  std::array<double, 2> travel_w{}, travel_sum{}, cong_sum{};
  for (const auto& m : measures) {
    auto& p = s.programs[static_cast<std::size_t>(m.program)];
    p.population += m.population;
    p.assigned += m.assigned;
    p.coverage += m.population * m.coverage;
    p.assigned_fraction += m.population * m.assigned_fraction;
    const auto k = static_cast<std::size_t>(m.program);
    if (m.travel_cost && m.congestion && m.assigned > 0.0) {
      travel_w[k] += m.assigned;
      travel_sum[k] += m.assigned * *m.travel_cost;
      cong_sum[k] += m.assigned * *m.congestion;
    }
  }
  for (std::size_t k = 0; k < 2; ++k) {
    auto& p = s.programs[k];
    if (p.population > 0.0) {
      p.coverage /= p.population;
      p.assigned_fraction /= p.population;
    } else {
      p.coverage = 1.0;
      p.assigned_fraction = 0.0;
    }
    if (travel_w[k] > 0.0) {
      p.travel_cost = travel_sum[k] / travel_w[k];
      p.congestion = cong_sum[k] / travel_w[k];
    }
  }
  s.flags.reserve(measures.size());
  for (const auto& m : measures) {
    const auto& p = s.programs[static_cast<std::size_t>(m.program)];
    TractFlags f;
    f.coverage = !m.coverage_vacuous && m.coverage > p.coverage;
    f.travel_cost = m.travel_cost && p.travel_cost && *m.travel_cost < *p.travel_cost;
    f.congestion = m.congestion && p.congestion && *m.congestion < *p.congestion;
    s.flags.push_back(f);
  }
  return s;
}

std::size_t QuadrantTable::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

double weighted_median(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) return 0.0;
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  });
  double total = 0.0;
  for (double w : weights) total += w;
  const bool unit = !(total > 0.0);
  if (unit) total = static_cast<double>(values.size());
  double cum = 0.0;
  for (std::size_t i : order) {
    cum += unit ? 1.0 : weights[i];
    if (cum >= 0.5 * total) return values[i];
  }
  return values[order.back()];
}

QuadrantTable quadrant_occupancy(std::span<const AccessMeasures> measures, Program program) {
  QuadrantTable q;
  std::vector<double> cov, travel, cong, w;
  for (const auto& m : measures) {
    if (m.program != program) continue;
    if (m.coverage_vacuous || !m.travel_cost || !m.congestion) {
      ++q.excluded;
      continue;
    }
    cov.push_back(m.coverage);
    travel.push_back(*m.travel_cost);
    cong.push_back(*m.congestion);
    w.push_back(m.population);
  }
  if (cov.empty()) return q;
  q.coverage_median = weighted_median(cov, w);
  q.travel_median = weighted_median(travel, w);
  q.congestion_median = weighted_median(cong, w);
  for (std::size_t i = 0; i < cov.size(); ++i) {
    ++q.counts[QuadrantTable::cell(cov[i] > q.coverage_median, travel[i] > q.travel_median,
                                   cong[i] > q.congestion_median)];
  }
  return q;
}

}  // namespace accessflow
