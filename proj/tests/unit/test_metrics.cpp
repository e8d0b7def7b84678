#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "accessflow/metrics.hpp"
#include "accessflow/rng.hpp"
#include "fixtures.hpp"

using namespace accessflow;

namespace {

AccessMeasures measure(std::size_t tract, Program p, double pop, double cov,
                       std::optional<double> travel, std::optional<double> cong) {
  AccessMeasures m;
  m.tract = tract;
  m.program = p;
  m.population = pop;
  m.assigned = travel ? pop : 0.0;
  m.coverage = cov;
  m.assigned_fraction = travel ? 1.0 : 0.0;
  m.travel_cost = travel;
  m.congestion = cong;
  return m;
}

DemandGroup group(std::size_t tract, Program p, Vehicle v, double pop) {
  DemandGroup g;
  g.tract = tract;
  g.program = p;
  g.vehicle = v;
  g.population = pop;
  g.radius = 10.0;
  return g;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("coverage examples") {
    std::vector<DemandGroup> g = {group(0, Program::medicaid, Vehicle::yes, 60),
                                  group(0, Program::medicaid, Vehicle::no, 40),
                                  group(0, Program::other, Vehicle::yes, 10),
                                  group(0, Program::other, Vehicle::no, 0)};
    std::vector<Edge> both = {{0, 0, 1.0}, {1, 0, 1.0}, {2, 0, 1.0}};
    CHECK(coverage(g, both, 0, Program::medicaid).value == 1.0);
    std::vector<Edge> vehicle_only = {{0, 0, 1.0}, {2, 0, 1.0}};
    CHECK(coverage(g, vehicle_only, 0, Program::medicaid).value == doctest::Approx(0.6));
    std::vector<Edge> none_accept = {{2, 0, 1.0}};
    CHECK(coverage(g, none_accept, 0, Program::medicaid).value == 0.0);
    CHECK(coverage(g, none_accept, 0, Program::other).value == 1.0);

    g[2].population = 0;
    const auto vac = coverage(g, none_accept, 0, Program::other);
    CHECK(vac.vacuous);
    CHECK(vac.value == 1.0);
  }

  TEST_CASE("travel and congestion examples") {
    std::vector<DemandGroup> g = {group(0, Program::medicaid, Vehicle::yes, 4),
                                  group(0, Program::other, Vehicle::yes, 2)};
    std::vector<PhysicianSite> s = {fixtures::site("A", 0, 0, 10), fixtures::site("B", 0, 0, 10)};
    AssignmentSolution sol;
    sol.loads = {2.0, 8.0};
    sol.flows = {{0, 0, 3.0, 2.0}, {0, 1, 1.0, 6.0}};
    CHECK(*travel_cost(sol, g, 0, Program::medicaid) == doctest::Approx(3.0));
    // utilizations 0.2 and 0.8 with flows 3 and 1
    CHECK(*congestion(sol, g, s, 0, Program::medicaid) == doctest::Approx((3 * 0.2 + 0.8) / 4));
    CHECK_FALSE(travel_cost(sol, g, 0, Program::other).has_value());
    CHECK_FALSE(congestion(sol, g, s, 0, Program::other).has_value());

    sol.flows = {{0, 0, 1.0, 5.0}, {0, 1, 1.0, 5.0}};
    CHECK(*travel_cost(sol, g, 0, Program::medicaid) == 5.0);
    CHECK(*congestion(sol, g, s, 0, Program::medicaid) == doctest::Approx(0.5));
    sol.loads = {5.0, 5.0};
    CHECK(*congestion(sol, g, s, 0, Program::medicaid) == doctest::Approx(0.5));
  }

  TEST_CASE("compare_populations: symmetric instance") {
    std::vector<std::vector<AccessMeasures>> reals;
    for (int r = 0; r < 30; ++r) {
      reals.push_back({measure(0, Program::medicaid, 5, 1.0, 2.0 + r, 0.5),
                       measure(0, Program::other, 5, 1.0, 2.0 + r, 0.5)});
    }
    for (const auto& d : compare_populations(reals)) {
      CHECK(d.mean_diff == 0.0);
      CHECK_FALSE(d.significant);
      CHECK(d.n_used == 30);
    }
  }

  TEST_CASE("compare_populations: forced coverage gap") {
    std::vector<std::vector<AccessMeasures>> reals;
    for (int r = 0; r < 20; ++r) {
      reals.push_back({measure(0, Program::medicaid, 5, 0.0, std::nullopt, std::nullopt),
                       measure(0, Program::other, 5, 0.7, 3.0, 0.4),
                       measure(1, Program::medicaid, 5, 0.0, std::nullopt, std::nullopt),
                       measure(1, Program::other, 5, 0.0, std::nullopt, std::nullopt)});
    }
    const auto diffs = compare_populations(reals);
    REQUIRE(diffs.size() == 6);
    CHECK(diffs[0].measure == Measure::coverage);
    CHECK(diffs[0].mean_diff == doctest::Approx(-0.7));
    CHECK(diffs[0].significant);
    CHECK(diffs[1].n_used == 0);  // travel MISSING on the Medicaid side
    CHECK_FALSE(diffs[1].significant);
    CHECK(diffs[3].mean_diff == 0.0);
    CHECK_FALSE(diffs[3].significant);

    reals.resize(9);
    for (const auto& d : compare_populations(reals)) {
      CHECK_FALSE(d.significant);
      if (d.n_used > 0) CHECK(d.insufficient);
    }
  }

  TEST_CASE("compare_populations: percentile interval") {
    std::vector<std::vector<AccessMeasures>> reals;
    // differences -10..29 in shuffled order
    std::vector<int> order(40);
    for (int i = 0; i < 40; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng rng(3);
    rng.shuffle(std::span<int>(order));
    for (int v : order) {
      reals.push_back({measure(0, Program::medicaid, 1, 1.0, v, 0.5),
                       measure(0, Program::other, 1, 1.0, 10.0, 0.5)});
    }
    const auto d = compare_populations(reals)[1];
    CHECK(d.mean_diff == doctest::Approx(9.5));
    // linear interpolation at positions 0.025 * 39 and 0.975 * 39
    CHECK(d.ci_low == doctest::Approx(-9.025));
    CHECK(d.ci_high == doctest::Approx(28.025));
    CHECK_FALSE(d.significant);
  }

  TEST_CASE("compare_populations: three-site toy against subset enumeration") {
    // one tract, Medicaid split evenly by vehicle; sites at 5, 15 and 40 miles
    std::vector<Tract> tracts = {fixtures::tract("T1", 33, -84, 100, 100)};
    std::vector<PhysicianSite> sites = {
        fixtures::site("A", 33 + fixtures::north(5), -84, 1000),
        fixtures::site("B", 33 + fixtures::north(15), -84, 1000),
        fixtures::site("C", 33 + fixtures::north(40), -84, 1000)};
    const Dataset d(tracts, sites, {{"C1", 2.0 / 3.0}}, {{"R1", 0.5, 0.5}});
    const auto groups = build_demand(d, 1.0);
    std::vector<double> caps(3, 1.0);
    SolverParams p;

    // exhaustive: Medicaid coverage minus other coverage per accepting pair
    auto expected_gap = [](const std::vector<bool>& acc) {
      const bool vehicle = acc[0];             // only A lies within 10 miles
      const bool no_vehicle = acc[0] || acc[1];  // A or B within 25 miles
      return 0.5 * vehicle + 0.5 * no_vehicle - 1.0;
    };

    std::vector<std::vector<AccessMeasures>> reals;
    std::vector<double> gaps;
    int seen[3] = {0, 0, 0};
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const auto acc = realize_acceptance(d, seed);
      REQUIRE(std::count(acc.begin(), acc.end(), true) == 2);
      seen[acc[0] ? (acc[1] ? 0 : 1) : 2]++;
      const auto edges = eligible_edges(groups, d, acc);
      const auto sol = solve(build_network(groups, d.sites(), edges, caps, p), p);
      reals.push_back(compute_measures(d, groups, edges, sol));
      gaps.push_back(expected_gap(acc));
    }
    CHECK(seen[0] > 0);
    CHECK(seen[1] > 0);
    CHECK(seen[2] > 0);
    const auto diffs = compare_populations(reals);
    std::sort(gaps.begin(), gaps.end());
    double mean = 0.0;
    for (double g : gaps) mean += g / static_cast<double>(gaps.size());
    CHECK(diffs[0].mean_diff == doctest::Approx(mean));
    CHECK(diffs[0].ci_low == doctest::Approx(-0.5));
    CHECK(diffs[0].ci_high == doctest::Approx(0.0));
  }

  TEST_CASE("statewide_summary examples") {
    std::vector<AccessMeasures> one = {measure(0, Program::medicaid, 5, 0.5, 3.0, 0.5)};
    auto s = statewide_summary(one);
    CHECK_FALSE(s.flags[0].coverage);
    CHECK_FALSE(s.flags[0].travel_cost);
    CHECK_FALSE(s.flags[0].congestion);

    std::vector<AccessMeasures> two = {measure(0, Program::medicaid, 5, 1.0, 2.0, 0.5),
                                       measure(1, Program::medicaid, 5, 1.0, 4.0, 0.5)};
    s = statewide_summary(two);
    CHECK(*s.programs[0].travel_cost == doctest::Approx(3.0));
    CHECK(s.flags[0].travel_cost);
    CHECK_FALSE(s.flags[1].travel_cost);

    std::vector<AccessMeasures> missing = {
        measure(0, Program::medicaid, 5, 0.0, std::nullopt, std::nullopt),
        measure(1, Program::medicaid, 5, 0.0, std::nullopt, std::nullopt)};
    s = statewide_summary(missing);
    CHECK_FALSE(s.programs[0].travel_cost.has_value());
    CHECK_FALSE(s.flags[0].travel_cost);
  }

  TEST_CASE("quadrant_occupancy examples") {
    std::vector<AccessMeasures> same;
    for (std::size_t i = 0; i < 5; ++i) same.push_back(measure(i, Program::medicaid, 1, 0.5, 3.0, 0.5));
    auto q = quadrant_occupancy(same, Program::medicaid);
    CHECK(q.counts[QuadrantTable::cell(false, false, false)] == 5);

    std::vector<AccessMeasures> anti = {measure(0, Program::medicaid, 1, 0.1, 1.0, 0.1),
                                        measure(1, Program::medicaid, 1, 0.9, 9.0, 0.9),
                                        measure(2, Program::medicaid, 1, 0.9, std::nullopt, std::nullopt)};
    q = quadrant_occupancy(anti, Program::medicaid);
    CHECK(q.counts[QuadrantTable::cell(false, false, false)] == 1);
    CHECK(q.counts[QuadrantTable::cell(true, true, true)] == 1);
    CHECK(q.excluded == 1);
    CHECK(q.total() == 2);

    Rng rng(17);
    std::vector<AccessMeasures> uniform;
    for (std::size_t i = 0; i < 1000; ++i) {
      uniform.push_back(measure(i, Program::medicaid, 1, rng.uniform(), rng.uniform(), rng.uniform()));
    }
    q = quadrant_occupancy(uniform, Program::medicaid);
    CHECK(q.total() == 1000);
    for (auto c : q.counts) {
      CHECK(c >= 85);
      CHECK(c <= 165);
    }
  }

  TEST_CASE("weighted_median") {
    const std::vector<double> v = {3, 1, 2, 10};
    CHECK(weighted_median(v, std::vector<double>{1, 1, 1, 1}) == 2.0);
    CHECK(weighted_median(v, std::vector<double>{0, 0, 0, 5}) == 10.0);
    CHECK(weighted_median(v, std::vector<double>{0, 0, 0, 0}) == 2.0);
  }

  TEST_CASE("average_measures skips MISSING") {
    std::vector<std::vector<AccessMeasures>> reals = {
        {measure(0, Program::medicaid, 5, 0.2, 4.0, 0.5)},
        {measure(0, Program::medicaid, 5, 0.4, std::nullopt, std::nullopt)},
        {measure(0, Program::medicaid, 5, 0.6, 6.0, 0.7)}};
    const auto avg = average_measures(reals);
    CHECK(avg[0].coverage == doctest::Approx(0.4));
    CHECK(*avg[0].travel_cost == doctest::Approx(5.0));
    CHECK(*avg[0].congestion == doctest::Approx(0.6));
  }
}
