// Acceptance checks. Usage: acceptance [criterion ...]; no arguments runs all.
// Prints one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "accessflow/assignment.hpp"
#include "accessflow/config.hpp"
#include "accessflow/metrics.hpp"
#include "accessflow/policy.hpp"
#include "accessflow/spline.hpp"
#include "accessflow/svc.hpp"
#include "accessflow/synth.hpp"
#include "commands.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "svc_sim.hpp"

using namespace accessflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void note(const std::string& line) { std::printf("  %s\n", line.c_str()); }

Outcome oracle_assignment() {
  Stopwatch clock;
  Rng rng(20240601);
  oracle::InstanceShape shape;
  int agree = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto inst = oracle::random_instance(rng, shape);
    const auto sol = solve(build_network(inst.groups, inst.sites, inst.edges, inst.caps, inst.params),
                           inst.params);
    const auto ref = oracle::integer_assignment(inst);
    const double d = std::abs(sol.objective - ref.objective);
    worst = std::max(worst, d);
    if (d <= 1e-9 && std::abs(sol.total_assigned - ref.assigned) <= 1e-9) ++agree;
  }
  const double secs = clock.seconds();
  return {agree == 200 && secs < 10.0,
          std::to_string(agree) + "/200 instances agree, max |dObj| " + fmt("%.3g", worst) +
              ", " + fmt("%.2f", secs) + " s"};
}

Outcome closure_fixed_point() {
  Rng rng(20240602);
  int feasible = 0, small = 0, exact = 0, tied = 0;
  for (int t = 0; t < 100; ++t) {
    oracle::InstanceShape shape;
    shape.integral = false;
    shape.max_sites = t % 2 ? 3 : 7;
    shape.max_groups = t % 2 ? 4 : 10;
    auto inst = oracle::random_instance(rng, shape);
    inst.params.min_panel = 1.0 + static_cast<double>(rng.below(8));
    const auto sol = enforce_min_panel(inst.groups, inst.sites, inst.edges, inst.caps, inst.params);
    bool ok = true;
    unsigned mask = 0;
    for (std::size_t j = 0; j < inst.sites.size(); ++j) {
      if (sol.closed[j]) continue;
      mask |= 1u << j;
      if (sol.loads[j] < inst.params.min_panel - 1e-9) ok = false;
    }
    feasible += ok;
    if (inst.sites.size() > 3) continue;
    ++small;
    const auto best = oracle::best_open_subset(inst);
    if (best.found && best.mask == mask) {
      ++exact;
    } else if (best.found && std::abs(best.value.assigned - sol.total_assigned) <= 1e-9 &&
               std::abs(best.value.objective - sol.objective) <= 1e-9) {
      ++tied;  // another open set with the same lexicographic value
    }
  }
  return {feasible == 100 && exact + tied == small,
          std::to_string(feasible) + "/100 final open sets meet P_min; " + std::to_string(exact) +
              "/" + std::to_string(small) + " small instances match the subset oracle" +
              (tied ? " (+" + std::to_string(tied) + " equal-value ties)" : "")};
}

double statewide(const SweepResult& r, Program p, Measure m) {
  return r.stats[static_cast<std::size_t>(p)][static_cast<std::size_t>(m)].mean.value_or(NAN);
}

Outcome directional_levers() {
  Stopwatch clock;
  const Dataset data = generate(georgia_preset());
  ScenarioConfig base;
  base.n_realizations = 50;
  const auto acc = run_sweep(data, base, Lever::acceptance_scale, {0.5, 1.0});
  const auto cas = run_sweep(data, base, Lever::caseload_scale, {0.5});
  const SweepResult& full = acc[1];
  const double t05 = statewide(acc[0], Program::medicaid, Measure::travel_cost);
  const double t10 = statewide(full, Program::medicaid, Measure::travel_cost);
  const double c05 = statewide(acc[0], Program::medicaid, Measure::coverage);
  const double c10 = statewide(full, Program::medicaid, Measure::coverage);
  const double g05 = statewide(cas[0], Program::medicaid, Measure::congestion);
  const double g10 = statewide(full, Program::medicaid, Measure::congestion);
  const double secs = clock.seconds();
  note("medicaid travel: acceptance 0.5 " + fmt("%.4f", t05) + " vs 1.0 " + fmt("%.4f", t10));
  note("medicaid coverage: acceptance 0.5 " + fmt("%.4f", c05) + " vs 1.0 " + fmt("%.4f", c10));
  note("medicaid congestion: caseload 0.5 " + fmt("%.4f", g05) + " vs 1.0 " + fmt("%.4f", g10));
  return {t05 >= t10 && c05 <= c10 && g05 <= g10 && secs < 600.0,
          "travel up, coverage down, congestion down as required; " + fmt("%.1f", secs) + " s"};
}

Outcome joint_occupancy() {
  const Dataset data = generate(georgia_preset());
  const ScenarioConfig config;  // shipped defaults
  const auto result = run_scenario(data, config);
  bool pass = false;
  std::string detail;
  for (Program p : {Program::medicaid, Program::other}) {
    const auto q = quadrant_occupancy(result.mean_measures, p);
    const double total = static_cast<double>(q.total());
    const double high_travel_high_cov =
        static_cast<double>(q.counts[QuadrantTable::cell(true, true, false)] +
                            q.counts[QuadrantTable::cell(true, true, true)]) / total;
    const double all_low = static_cast<double>(q.counts[QuadrantTable::cell(false, false, false)]) / total;
    const bool ok = high_travel_high_cov < 0.10 && all_low < 0.10;
    note(std::string(to_string(p)) + ": high travel & high coverage " +
         fmt("%.1f%%", 100 * high_travel_high_cov) + ", low travel/congestion/coverage " +
         fmt("%.1f%%", 100 * all_low) + ", coverage median " + fmt("%.3f", q.coverage_median) +
         ", " + std::to_string(q.total()) + " tracts, " + std::to_string(q.excluded) +
         " excluded" + (ok ? "" : " (above 10%)"));
    if (p == Program::medicaid) {
      pass = ok;
      detail = "medicaid cells " + fmt("%.1f%%", 100 * high_travel_high_cov) + " and " +
               fmt("%.1f%%", 100 * all_low) + " (< 10%), seed " +
               std::to_string(georgia_preset().seed);
    }
  }
  return {pass, detail};
}

Outcome preset_fidelity() {
  const Dataset d = generate(georgia_preset());
  std::set<std::string> with;
  for (const auto& s : d.sites()) with.insert(s.county_id);
  const double zero = 1.0 - static_cast<double>(with.size()) / static_cast<double>(d.counties().size());
  return {d.counties().size() == 159 && d.sites().size() == 768 && zero >= 0.25,
          std::to_string(d.counties().size()) + " counties, " + std::to_string(d.sites().size()) +
              " physicians, " + fmt("%.1f%%", 100 * zero) + " physician-free counties"};
}

Outcome svcm_correctness() {
  Stopwatch clock;
  Rng rng(20240606);
  std::vector<std::string> failures;

  // (a) lambda = 0, one covariate: fitted values equal the OLS projection
  {
    Eigen::MatrixXd x(400, 1);
    Eigen::MatrixX2d coords(400, 2);
    Eigen::VectorXd y(400);
    for (int i = 0; i < 400; ++i) {
      coords(i, 0) = rng.uniform();
      coords(i, 1) = rng.uniform();
      x(i, 0) = rng.normal();
      y(i) = 0.5 + (1.0 + coords(i, 0) * coords(i, 1)) * x(i, 0) + rng.normal(0, 0.3);
    }
    const auto d = make_design(y, x, coords, {"x"});
    SvcSpec spec;
    spec.basis_k = 4;
    spec.tolerance = 1e-14;
    spec.max_iterations = 10000;
    spec.terms["x"] = {TermMode::varying, 0.0};
    const auto basis = build_basis(d.coords, spec.basis_k);
    const auto fit = backfit(d, spec, basis);
    const Eigen::MatrixXd z = basis.dense();
    Eigen::MatrixXd a(400, 1 + z.cols());
    a.col(0).setOnes();
    a.rightCols(z.cols()) = z.array().colwise() * d.x.col(0).array();
    const Eigen::VectorXd ref = a * oracle::ols(a, d.y);
    const double rel = (fit.fitted - ref).norm() / ref.norm();
    note("lambda 0 fit vs OLS oracle: relative error " + fmt("%.2e", rel));
    if (!(rel <= 1e-8)) failures.push_back("OLS");

    const Eigen::VectorXd theta = penalized_solve(z, d.y, 0.0, basis.penalty);
    const Eigen::VectorXd qr = oracle::ols(z, d.y);
    const double rel2 = (theta - qr).norm() / qr.norm();
    note("penalized_solve lambda 0 vs QR: relative error " + fmt("%.2e", rel2));
    if (!(rel2 <= 1e-8)) failures.push_back("penalized_solve");
  }

  // (b) RSS across sweeps on 20 random designs
  {
    int monotone = 0;
    int objective_monotone = 0;
    double worst = 0.0;
    SvcSpec spec;
    spec.terms["x0"] = {TermMode::varying, 0.5};
    spec.terms["x1"] = {TermMode::varying, 2.0};
    for (int t = 0; t < 20; ++t) {
      const auto d = sim::random_design(rng, 200 + 10 * t, 2 + t % 3);
      const auto basis = build_basis(d.coords, spec.basis_k);
      const auto fit = backfit(d, spec, basis);
      bool ok = true;
      for (std::size_t i = 1; i < fit.rss_history.size(); ++i) {
        const double rise = fit.rss_history[i] / fit.rss_history[i - 1] - 1.0;
        worst = std::max(worst, rise);
        if (fit.rss_history[i] > fit.rss_history[i - 1] * (1 + 1e-12) + 1e-12) ok = false;
      }
      monotone += ok;

      // informational: the penalized objective along the same sweeps
      const sim::Objective f(d, spec, basis);
      double prev = std::numeric_limits<double>::infinity();
      bool down = true;
      for (int it = 1; it <= fit.n_iterations; ++it) {
        SvcSpec s = spec;
        s.max_iterations = it;
        s.tolerance = 0.0;
        const double v = f.value(sim::pack(backfit(d, s, basis)));
        if (v > prev * (1 + 1e-12)) down = false;
        prev = v;
      }
      objective_monotone += down;
    }
    note("RSS nonincreasing on " + std::to_string(monotone) + "/20 designs, largest relative rise " +
         fmt("%.2e", worst));
    note("penalized objective nonincreasing on " + std::to_string(objective_monotone) +
         "/20 designs (not part of the verdict)");
    if (monotone != 20) failures.push_back("RSS");
  }

  // (c) sin field recovery
  {
    const auto s = sim::sin_field_design(20240607, 2000, 0.01);
    const auto fit = backfit(s.design, sim::sin_field_spec());
    const double rmse = std::sqrt((fit.beta.col(0) - s.truth).squaredNorm() / 2000.0);
    note("sin field RMSE " + fmt("%.4g", rmse) + " (k = 16, lambda = 1e-4)");
    if (!(rmse < 0.05)) failures.push_back("sin field");
  }

  // (d) gradient of the penalized objective at the fitted solution
  {
    const auto d = sim::random_design(rng, 300, 3);
    SvcSpec spec;
    spec.basis_k = 6;
    spec.tolerance = 1e-13;
    spec.max_iterations = 20000;
    spec.terms["x0"] = {TermMode::varying, 0.3};
    spec.terms["x2"] = {TermMode::varying, 3.0};
    const auto basis = build_basis(d.coords, spec.basis_k);
    const auto fit = backfit(d, spec, basis);
    const sim::Objective f(d, spec, basis);
    const Eigen::VectorXd u = sim::pack(fit);
    const Eigen::VectorXd num = f.numeric_gradient(u, 1e-4);
    const Eigen::VectorXd g = f.gradient(u);
    const double scale = f.gradient(Eigen::VectorXd::Zero(u.size())).cwiseAbs().maxCoeff();
    const double agree = (g - num).cwiseAbs().maxCoeff() / scale;
    const double stationary = num.cwiseAbs().maxCoeff() / scale;
    note("gradient: analytic vs central differences " + fmt("%.2e", agree) +
         ", finite-difference gradient at the solution " + fmt("%.2e", stationary) + " (relative)");
    if (!(agree <= 1e-6 && stationary <= 1e-6)) failures.push_back("gradient");
  }

  const double secs = clock.seconds();
  if (secs >= 120.0) failures.push_back("runtime");
  std::string detail = failures.empty() ? "all four checks hold" : "failed:";
  for (const auto& f : failures) detail += " " + f;
  return {failures.empty(), detail + ", " + fmt("%.1f", secs) + " s"};
}

Outcome bootstrap_coverage() {
  Stopwatch clock;
  const auto spec = sim::sin_field_spec();
  double covered = 0.0;
  double lo_rate = 1.0, hi_rate = 0.0;
  for (int r = 0; r < 100; ++r) {
    const auto s = sim::sin_field_design(derive_seed(20240608, static_cast<std::uint64_t>(r)), 2000, 0.01);
    const auto bands = bootstrap_ci(s.design, spec, 200, derive_seed(77, static_cast<std::uint64_t>(r)), 0);
    int in = 0;
    for (Eigen::Index i = 0; i < s.truth.size(); ++i) {
      in += bands.lo(i, 0) <= s.truth(i) && s.truth(i) <= bands.hi(i, 0);
    }
    const double rate = in / static_cast<double>(s.truth.size());
    lo_rate = std::min(lo_rate, rate);
    hi_rate = std::max(hi_rate, rate);
    covered += rate / 100.0;
  }
  const double secs = clock.seconds();
  note("per-replicate pointwise coverage ranges " + fmt("%.3f", lo_rate) + " to " + fmt("%.3f", hi_rate));
  return {covered >= 0.88 && covered <= 0.98 && secs < 1200.0,
          "empirical coverage " + fmt("%.2f%%", 100 * covered) + " of 95% bands over 100 replicates (B = 200), " +
              fmt("%.1f", secs) + " s"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fixtures::temp_dir("acceptance_determinism");
  std::ostringstream sink;
  cli::SynthOptions so;
  so.preset = "georgia";
  so.out = (root / "data").string();
  if (cli::cmd_synth(so, sink, sink) != cli::kOk) return {false, "synth failed: " + sink.str()};
  {
    std::ofstream(root / "run.cfg") << "n_realizations = 4\nP_min = 50\nbase_seed = 7\n";
  }
  for (int k = 0; k < 2; ++k) {
    cli::AssignOptions ao;
    ao.data = so.out;
    ao.config = (root / "run.cfg").string();
    ao.out = (root / ("run" + std::to_string(k))).string();
    ao.threads = k + 1;  // one worker, then two
    if (cli::cmd_assign(ao, sink, sink) != cli::kOk) return {false, "assign failed: " + sink.str()};
  }
  int same = 0;
  const char* files[] = {"flows.csv", "sites.csv", "measures.csv", "diffs.csv"};
  for (const char* f : files) {
    same += slurp(root / "run0" / f) == slurp(root / "run1" / f) && !slurp(root / "run0" / f).empty();
  }
  return {same == 4, std::to_string(same) + "/4 data files byte-identical across two runs (1 and 2 threads)"};
}

Outcome symmetry_null() {
  // tracts mirrored about a meridian, sites likewise; equal demand in both programs
  std::vector<Tract> tracts;
  std::vector<PhysicianSite> sites;
  Rng rng(20240609);
  const double lon0 = -84.0;
  for (int i = 0; i < 20; ++i) {
    const double lat = 33.0 + rng.uniform(0, 0.6);
    const double dx = rng.uniform(0.01, 0.4);
    const double pop = 20 + static_cast<double>(rng.below(60));
    const std::string county = i % 2 ? "C1" : "C2";
    tracts.push_back(fixtures::tract("TE" + std::to_string(10 + i), lat, lon0 + dx, pop, pop, county));
    tracts.push_back(fixtures::tract("TW" + std::to_string(10 + i), lat, lon0 - dx, pop, pop, county));
  }
  for (int j = 0; j < 6; ++j) {
    const double lat = 33.0 + rng.uniform(0, 0.6);
    const double dx = rng.uniform(0.01, 0.4);
    const double cap = 60 + static_cast<double>(rng.below(120));
    sites.push_back(fixtures::site("PE" + std::to_string(j), lat, lon0 + dx, cap, "C1"));
    sites.push_back(fixtures::site("PW" + std::to_string(j), lat, lon0 - dx, cap, "C2"));
  }
  const Dataset d(tracts, sites, {{"C1", 1.0}, {"C2", 1.0}}, {{"R1", 0.7, 0.7}});
  ScenarioConfig c;
  c.n_realizations = 100;
  c.base_caps = {1.0, 1.0, 1.0};
  c.P_min = 30.0;
  const auto result = run_scenario(d, c);
  int flagged = 0, compared = 0;
  std::set<std::size_t> tracts_flagged;
  for (const auto& diff : result.diffs) {
    compared += diff.n_used > 0;
    if (diff.significant) tracts_flagged.insert(diff.tract);
  }
  flagged = static_cast<int>(tracts_flagged.size());
  return {flagged == 0, std::to_string(flagged) + " of " + std::to_string(tracts.size()) +
                            " tracts flagged significant over 100 realizations (" +
                            std::to_string(compared) + " tract-measure comparisons)"};
}

const std::vector<std::pair<const char*, std::function<Outcome()>>> kCriteria = {
    {"oracle equivalence, assignment", oracle_assignment},
    {"closure fixed point", closure_fixed_point},
    {"directional lever checks", directional_levers},
    {"joint-distribution occupancy", joint_occupancy},
    {"preset fidelity", preset_fidelity},
    {"SVCM correctness", svcm_correctness},
    {"bootstrap sanity", bootstrap_coverage},
    {"determinism", determinism},
    {"symmetry null", symmetry_null},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int i = 1; i <= static_cast<int>(kCriteria.size()); ++i) which.push_back(i);
  }
  int failed = 0;
  for (int n : which) {
    if (n < 1 || n > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    const auto& [name, check] = kCriteria[static_cast<std::size_t>(n - 1)];
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
