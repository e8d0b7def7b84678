#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "accessflow/config.hpp"
#include "accessflow/synth.hpp"
#include "csv.hpp"
#include "run_files.hpp"

namespace accessflow::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Maps library exceptions onto exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const SingularSystem& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const BootstrapFailed& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const DataError& e) {
    err << "data error at " << e.where() << ": " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SvcError& e) {
    err << "design error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

fs::path prepare_out(const std::string& out) {
  require(!out.empty(), "--out is required");
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

std::string synth_text(const SynthParams& p) {
  std::ostringstream s;
  s << "n_counties = " << p.n_counties << '\n'
    << "n_tracts = " << p.n_tracts << '\n'
    << "n_physicians = " << p.n_physicians << '\n'
    << "n_urban_cores = " << p.n_urban_cores << '\n'
    << "n_regions = " << p.n_regions << '\n'
    << "density_decay = " << csv::fmt_exact(p.density_decay) << '\n'
    << "core_peak = " << csv::fmt_exact(p.core_peak) << '\n'
    << "gamma = " << csv::fmt_exact(p.gamma) << '\n'
    << "medicaid_share_base = " << csv::fmt_exact(p.medicaid_share_base) << '\n'
    << "medicaid_share_gradient = " << csv::fmt_exact(p.medicaid_share_gradient) << '\n'
    << "acceptance_mean = " << csv::fmt_exact(p.acceptance_mean) << '\n'
    << "acceptance_spread = " << csv::fmt_exact(p.acceptance_spread) << '\n'
    << "tract_population = " << csv::fmt_exact(p.tract_population) << '\n'
    << "capacity_mean = " << csv::fmt_exact(p.capacity_mean) << '\n'
    << "seed = " << p.seed << '\n';
  return s.str();
}

void add_data_inputs(Manifest& m, const fs::path& data_dir) {
  for (const char* f : {"tracts.csv", "physicians.csv", "counties.csv", "regions.csv"}) {
    const fs::path p = data_dir / f;
    m.inputs[p.string()] = sha256_file(p);
  }
  m.extra["data_dir"] = fs::absolute(data_dir).lexically_normal().string();
}

template <class Fn>
std::string to_string_with(Fn&& write) {
  std::ostringstream s;
  write(s);
  return s.str();
}

std::string fmt4(const std::optional<double>& v) {
  if (!v) return "MISSING";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

std::string statewide_table(const StatewideSummary& s) {
  std::ostringstream o;
  char line[160];
  std::snprintf(line, sizeof line, "%-9s %10s %10s %10s %10s %12s\n", "program", "coverage",
                "assigned", "travel", "congestion", "population");
  o << line;
  for (Program p : {Program::medicaid, Program::other}) {
    const auto& ps = s.programs[static_cast<std::size_t>(p)];
    std::snprintf(line, sizeof line, "%-9s %10s %10s %10s %10s %12.0f\n", to_string(p),
                  fmt4(ps.coverage).c_str(), fmt4(ps.assigned_fraction).c_str(),
                  fmt4(ps.travel_cost).c_str(), fmt4(ps.congestion).c_str(), ps.population);
    o << line;
  }
  return o.str();
}

// Files written for one scenario: flows and sites come from realization 0,
// measures are averaged over realizations.
void write_scenario_dir(const fs::path& dir, const Dataset& data, const ScenarioResult& res,
                        Manifest& m) {
  write_text_file(dir, "flows.csv", to_string_with([&](std::ostream& o) {
                    write_flows_csv(o, data, res.groups, res.solutions.front());
                  }), m);
  write_text_file(dir, "sites.csv", to_string_with([&](std::ostream& o) {
                    write_sites_csv(o, data, res.solutions.front(), res.acceptance.front());
                  }), m);
  write_text_file(dir, "measures.csv", to_string_with([&](std::ostream& o) {
                    write_measures_csv(o, data, res.mean_measures);
                  }), m);
  write_text_file(dir, "diffs.csv", to_string_with([&](std::ostream& o) {
                    write_diffs_csv(o, data, res.diffs);
                  }), m);
}

std::size_t count_significant_tracts(std::span<const DiffResult> diffs) {
  std::set<std::size_t> t;
  for (const auto& d : diffs) {
    if (d.significant) t.insert(d.tract);
  }
  return t.size();
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  for (const auto& field : csv::split(text)) {
    const auto v = csv::parse_double(field);
    if (!v) throw ConfigError("bad grid value '" + field + "'");
    grid.push_back(*v);
  }
  return grid;
}

}  // namespace

int resolve_threads(std::optional<int> flag) {
  if (flag) return std::max(0, *flag);
  if (const char* env = std::getenv("ACCESSFLOW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) return static_cast<int>(v);
  }
  return 0;
}

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto t0 = Clock::now();
    require(o.preset.empty() != o.params.empty(), "give exactly one of --preset or --params");
    const fs::path dir = prepare_out(o.out);
    Manifest m;
    m.command = "synth";
    SynthParams p;
    if (!o.preset.empty()) {
      require(o.preset == "georgia", "unknown preset '" + o.preset + "'");
      p = georgia_preset();
    } else {
      p = load_synth_params(o.params);
      m.inputs[o.params] = sha256_file(o.params);
    }
    if (o.seed) p.seed = *o.seed;
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const Dataset data = generate(p);
    write_dataset_dir(dir.string(), data);
    m.outputs = {"tracts.csv", "physicians.csv", "counties.csv", "regions.csv"};
    m.config = synth_text(p);
    m.seed = p.seed;
    m.wall_time = seconds_since(t0);
    write_manifest(dir, m);

    std::set<std::string> supplied;
    for (const auto& s : data.sites()) supplied.insert(s.county_id);
    out << "counties " << data.counties().size() << ", tracts " << data.tracts().size()
        << ", physicians " << data.sites().size() << ", counties without a physician "
        << data.counties().size() - supplied.size() << '\n';
    return kOk;
  });
}

int cmd_assign(const AssignOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto t0 = Clock::now();
    require(!o.data.empty(), "--data is required");
    require(!o.config.empty(), "--config is required");
    const fs::path dir = prepare_out(o.out);
    const Dataset data = load_dataset_dir(o.data);
    const ScenarioConfig config = load_scenario_config(o.config);
    const ScenarioResult res = run_scenario(data, config, o.threads);

    Manifest m;
    m.command = "assign";
    m.config = to_text(config);
    m.seed = config.base_seed;
    add_data_inputs(m, o.data);
    m.inputs[o.config] = sha256_file(o.config);
    write_scenario_dir(dir, data, res, m);
    m.wall_time = seconds_since(t0);
    write_manifest(dir, m);

    out << statewide_table(statewide_summary(res.mean_measures));
    out << "realizations " << config.n_realizations << ", closed sites (realization 0) "
        << res.solutions.front().closed_sites().size() << ", tracts with a significant difference "
        << count_significant_tracts(res.diffs) << '\n';
    return kOk;
  });
}

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto t0 = Clock::now();
    require(!o.data.empty(), "--data is required");
    require(!o.config.empty(), "--config is required");
    const Lever lever = parse_lever(o.lever);
    const std::vector<double> grid = parse_grid(o.grid);
    const fs::path dir = prepare_out(o.out);
    const Dataset data = load_dataset_dir(o.data);
    const ScenarioConfig config = load_scenario_config(o.config);

    Manifest m;
    m.command = "sweep";
    m.config = to_text(config);
    m.seed = config.base_seed;
    add_data_inputs(m, o.data);
    m.inputs[o.config] = sha256_file(o.config);
    m.extra["lever"] = to_string(lever);
    m.extra["grid"] = o.grid;

    std::vector<SweepResult> rows;
    try {
      rows = run_sweep(data, config, lever, grid, o.threads,
                       [&](std::size_t i, const ScenarioResult& res) {
                         const auto pt0 = Clock::now();
                         const std::string name = "point_" + std::to_string(i);
                         const fs::path sub = dir / name;
                         fs::create_directories(sub);
                         ScenarioConfig c = config;
                         set_lever(c, lever, grid[i]);
                         Manifest pm;
                         pm.command = "sweep";
                         pm.config = to_text(c);
                         pm.seed = c.base_seed;
                         pm.inputs = m.inputs;
                         pm.extra = m.extra;
                         pm.extra["value"] = csv::fmt(grid[i]);
                         write_scenario_dir(sub, data, res, pm);
                         pm.wall_time = seconds_since(pt0);
                         write_manifest(sub, pm);
                         m.outputs.push_back(name + "/");
                       });
    } catch (const InvalidGrid& e) {
      throw ConfigError(e.what());
    }
    write_text_file(dir, "sweep.csv", to_string_with([&](std::ostream& s) {
                      write_sweep_csv(s, rows);
                    }), m);
    m.wall_time = seconds_since(t0);
    write_manifest(dir, m);

    char line[160];
    std::snprintf(line, sizeof line, "%-17s %10s %-9s %10s %10s %10s %9s\n", "lever", "value",
                  "program", "coverage", "travel", "congestion", "closures");
    out << line;
    for (const auto& r : rows) {
      for (Program p : {Program::medicaid, Program::other}) {
        const auto& st = r.stats[static_cast<std::size_t>(p)];
        std::snprintf(line, sizeof line, "%-17s %10g %-9s %10s %10s %10s %9.2f\n",
                      to_string(r.lever), r.value, to_string(p), fmt4(st[0].mean).c_str(),
                      fmt4(st[1].mean).c_str(), fmt4(st[2].mean).c_str(), r.closures);
        out << line;
      }
    }
    return kOk;
  });
}

int cmd_svc(const SvcOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto t0 = Clock::now();
    require(!o.data.empty(), "--data is required");
    require(!o.measures.empty(), "--measures is required");
    require(!o.spec.empty(), "--spec is required");
    const SvcSpec spec = load_svc_spec(o.spec);
    const fs::path dir = prepare_out(o.out);
    const Dataset data = load_dataset_dir(o.data);
    std::ifstream min(o.measures);
    if (!min) throw InputError("cannot open " + o.measures);
    const auto measures = read_measures_csv(min, o.measures, data);

    const Design design = build_design(measures, data.tracts(), spec.measure, spec.program);
    const SvcFit fit = backfit(design, spec);
    const Bands bands = bootstrap_ci(design, spec, spec.bootstrap_B, spec.seed, o.threads);

    Manifest m;
    m.command = "svc";
    m.seed = spec.seed;
    {
      std::ifstream s(o.spec);
      std::ostringstream text;
      text << s.rdbuf();
      m.config = text.str();
    }
    add_data_inputs(m, o.data);
    m.inputs[o.measures] = sha256_file(o.measures);
    m.inputs[o.spec] = sha256_file(o.spec);

    write_text_file(dir, "svcfit.csv", to_string_with([&](std::ostream& s) {
                      write_svcfit_csv(s, data, design, fit, bands);
                    }), m);
    std::ostringstream sum;
    sum << "measure " << to_string(spec.measure) << ", program " << to_string(spec.program) << '\n'
        << "converged " << (fit.converged ? "yes" : "NO (last iterate reported)") << '\n'
        << "iterations " << fit.n_iterations << '\n'
        << "rss " << csv::fmt(fit.rss) << '\n'
        << "rows " << design.y.size() << ", dropped " << design.dropped << '\n'
        << "intercept " << csv::fmt(fit.intercept) << '\n'
        << "bootstrap replicates " << bands.replicates << " in " << bands.attempts
        << " attempts\n";
    char line[200];
    std::snprintf(line, sizeof line, "%-14s %-9s %10s %12s %12s %12s\n", "covariate", "mode",
                  "lambda", "slope", "field_min", "field_max");
    sum << line;
    for (std::size_t j = 0; j < design.names.size(); ++j) {
      const auto t = spec.term(design.names[j]);
      const auto col = fit.beta.col(static_cast<Eigen::Index>(j));
      std::snprintf(line, sizeof line, "%-14s %-9s %10g %12.6g %12.6g %12.6g\n",
                    design.names[j].c_str(), t.mode == TermMode::varying ? "varying" : "constant",
                    t.lambda, fit.slopes(static_cast<Eigen::Index>(j)), col.minCoeff(),
                    col.maxCoeff());
      sum << line;
    }
    write_text_file(dir, "svc_summary.txt", sum.str(), m);
    m.wall_time = seconds_since(t0);
    write_manifest(dir, m);
    out << sum.str();
    return kOk;
  });
}

int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto t0 = Clock::now();
    require(!o.run.empty(), "--run is required");
    const fs::path run_dir(o.run);
    for (const char* f : {"measures.csv", "diffs.csv", "manifest.json"}) {
      if (!fs::exists(run_dir / f)) throw InputError("run directory lacks " + std::string(f));
    }
    const Manifest run_manifest = read_manifest(run_dir);
    std::string data_dir = o.data;
    if (data_dir.empty()) {
      const auto it = run_manifest.extra.find("data_dir");
      if (it == run_manifest.extra.end()) throw InputError("run manifest names no data directory");
      data_dir = it->second;
    }
    const Dataset data = load_dataset_dir(data_dir);
    std::ifstream min(run_dir / "measures.csv");
    const auto measures = read_measures_csv(min, (run_dir / "measures.csv").string(), data);
    std::ifstream din(run_dir / "diffs.csv");
    const auto diffs = read_diffs_csv(din, (run_dir / "diffs.csv").string());
    const fs::path dir = prepare_out(o.out);

    Manifest m;
    m.command = "report";
    m.config = run_manifest.config;
    m.seed = run_manifest.seed;
    add_data_inputs(m, data_dir);
    m.inputs[(run_dir / "measures.csv").string()] = sha256_file(run_dir / "measures.csv");
    m.inputs[(run_dir / "diffs.csv").string()] = sha256_file(run_dir / "diffs.csv");

    // GeoJSON: one point per tract with measures and difference intervals.
    const auto& tracts = data.tracts();
    std::vector<nlohmann::ordered_json> props(tracts.size());
    for (std::size_t t = 0; t < tracts.size(); ++t) {
      props[t]["tract_id"] = tracts[t].id;
      props[t]["significant"] = false;
    }
    for (const auto& mm : measures) {
      auto& p = props[mm.tract];
      for (Measure which : kMeasures) {
        const std::string key = std::string(to_string(mm.program)) + "_" + to_string(which);
        const auto v = which == Measure::coverage ? std::optional<double>(mm.coverage)
                                                  : value_of(mm, which);
        if (v) p[key] = *v;
        else p[key] = nullptr;
      }
    }
    for (const auto& d : diffs) {
      std::size_t t = 0;
      try {
        t = data.tract_index(d.tract_id);
      } catch (const std::out_of_range&) {
        throw InputError("diffs.csv names unknown tract '" + d.tract_id + "'");
      }
      auto& p = props[t];
      const std::string m_name = to_string(d.measure);
      if (d.n_used > 0) {
        p["diff_" + m_name] = d.mean_diff;
        p["ci_low_" + m_name] = d.ci_low;
        p["ci_high_" + m_name] = d.ci_high;
      } else {
        p["diff_" + m_name] = nullptr;
        p["ci_low_" + m_name] = nullptr;
        p["ci_high_" + m_name] = nullptr;
      }
      p["significant_" + m_name] = d.significant;
      if (d.significant) p["significant"] = true;
    }
    nlohmann::ordered_json fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < tracts.size(); ++t) {
      nlohmann::ordered_json f;
      f["type"] = "Feature";
      f["geometry"] = {{"type", "Point"},
                       {"coordinates", {tracts[t].centroid.lon, tracts[t].centroid.lat}}};
      f["properties"] = props[t];
      fc["features"].push_back(std::move(f));
    }
    write_text_file(dir, "tracts.geojson", fc.dump() + "\n", m);

    // Quadrant table and statewide summary.
    std::ostringstream q;
    q << "program,coverage,travel_cost,congestion,count\n";
    std::ostringstream sum;
    sum << statewide_table(statewide_summary(measures));
    std::size_t n_sig = 0;
    for (const auto& p : props) n_sig += p["significant"].get<bool>() ? 1 : 0;
    sum << "tracts with a significant medicaid-other difference " << n_sig << '\n';
    for (Program p : {Program::medicaid, Program::other}) {
      const auto table = quadrant_occupancy(measures, p);
      for (int c = 0; c < 8; ++c) {
        const bool cov = c & 4, trav = c & 2, cong = c & 1;
        q << to_string(p) << ',' << (cov ? "high" : "low") << ',' << (trav ? "high" : "low")
          << ',' << (cong ? "high" : "low") << ',' << table.counts[static_cast<std::size_t>(c)]
          << '\n';
      }
      sum << to_string(p) << " quadrants: medians coverage " << csv::fmt(table.coverage_median, 6)
          << ", travel " << csv::fmt(table.travel_median, 6) << ", congestion "
          << csv::fmt(table.congestion_median, 6) << "; " << table.total()
          << " tracts classified, " << table.excluded << " excluded (MISSING)\n";
      const double total = static_cast<double>(std::max<std::size_t>(table.total(), 1));
      char line[160];
      std::snprintf(line, sizeof line,
                    "  high travel with high coverage %.1f%%, low travel/congestion/coverage %.1f%%\n",
                    100.0 * static_cast<double>(table.counts[6] + table.counts[7]) / total,
                    100.0 * static_cast<double>(table.counts[0]) / total);
      sum << line;
    }
    write_text_file(dir, "quadrants.csv", q.str(), m);
    write_text_file(dir, "summary.txt", sum.str(), m);
    m.wall_time = seconds_since(t0);
    write_manifest(dir, m);
    out << sum.str();
    return kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial access to physicians: assignment, measures, sweeps and regression"};
  app.require_subcommand(1);

  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--preset", so.preset, "Named preset (georgia)");
  synth->add_option("--params", so.params, "Generator parameter file");
  synth->add_option("--out", so.out, "Output directory");
  std::optional<std::uint64_t> seed;
  synth->add_option("--seed", seed, "Override the generator seed");

  AssignOptions ao;
  std::optional<int> a_threads;
  auto* assign = app.add_subcommand("assign", "Run one scenario");
  assign->add_option("--data", ao.data, "Dataset directory");
  assign->add_option("--config", ao.config, "Scenario config file");
  assign->add_option("--out", ao.out, "Output directory");
  assign->add_option("--threads", a_threads, "Worker threads");

  SweepOptions wo;
  std::optional<int> w_threads;
  auto* sweep = app.add_subcommand("sweep", "Sweep one policy lever");
  sweep->add_option("--data", wo.data, "Dataset directory");
  sweep->add_option("--config", wo.config, "Scenario config file");
  sweep->add_option("--lever", wo.lever, "acceptance_scale, caseload_scale, mobility_scale or P_min");
  sweep->add_option("--grid", wo.grid, "Comma-separated lever values");
  sweep->add_option("--out", wo.out, "Output directory");
  sweep->add_option("--threads", w_threads, "Worker threads");

  SvcOptions vo;
  std::optional<int> v_threads;
  auto* svc = app.add_subcommand("svc", "Fit a spatially varying coefficient model");
  svc->add_option("--data", vo.data, "Dataset directory");
  svc->add_option("--measures", vo.measures, "measures.csv from an assign run");
  svc->add_option("--spec", vo.spec, "Model specification file");
  svc->add_option("--out", vo.out, "Output directory");
  svc->add_option("--threads", v_threads, "Worker threads");

  ReportOptions ro;
  auto* report = app.add_subcommand("report", "GeoJSON map, quadrant table and summary of a run");
  report->add_option("--run", ro.run, "Output directory of an assign run");
  report->add_option("--out", ro.out, "Output directory");
  report->add_option("--data", ro.data, "Dataset directory (defaults to the run's)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  if (synth->parsed()) {
    so.seed = seed;
    return cmd_synth(so, out, err);
  }
  if (assign->parsed()) {
    ao.threads = resolve_threads(a_threads);
    return cmd_assign(ao, out, err);
  }
  if (sweep->parsed()) {
    wo.threads = resolve_threads(w_threads);
    return cmd_sweep(wo, out, err);
  }
  if (svc->parsed()) {
    vo.threads = resolve_threads(v_threads);
    return cmd_svc(vo, out, err);
  }
  return cmd_report(ro, out, err);
}

}  // namespace accessflow::cli
