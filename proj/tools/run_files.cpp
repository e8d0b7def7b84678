#include "run_files.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"

namespace accessflow::cli {

namespace {

std::string opt(const std::optional<double>& v) { return v ? csv::fmt(*v) : std::string(); }

const char* yes_no(bool b) { return b ? "true" : "false"; }

std::vector<std::string> header(csv::Reader& r, const std::vector<std::string>& expected) {
  std::vector<std::string> f;
  if (!r.next(f)) throw InputError(r.name + ": empty file");
  for (auto& s : f) s = csv::trim(s);
  if (f != expected) throw InputError(r.where() + ": unexpected header");
  return f;
}

double number(const std::string& s, const csv::Reader& r) {
  const auto v = csv::parse_double(s);
  if (!v) throw InputError(r.where() + ": bad number '" + s + "'");
  return *v;
}

std::optional<double> maybe_number(const std::string& s, const csv::Reader& r) {
  if (csv::trim(s).empty()) return std::nullopt;
  return number(s, r);
}

}  // namespace

void write_flows_csv(std::ostream& out, const Dataset& data, std::span<const DemandGroup> groups,
                     const AssignmentSolution& solution) {
  out << "tract_id,program,vehicle,site_id,flow,distance\n";
  for (const auto& f : solution.flows) {
    const auto& g = groups[f.group];
    out << data.tracts()[g.tract].id << ',' << to_string(g.program) << ',' << to_string(g.vehicle)
        << ',' << data.sites()[f.site].id << ',' << csv::fmt(f.flow) << ','
        << csv::fmt(f.distance) << '\n';
  }
}

void write_sites_csv(std::ostream& out, const Dataset& data, const AssignmentSolution& solution,
                     const std::vector<bool>& acceptance) {
  out << "site_id,county_id,site_type,capacity,accepts_medicaid,load,medicaid_load,utilization,"
         "closed\n";
  const auto& sites = data.sites();
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const auto& s = sites[j];
    const double load = solution.loads[j];
    out << s.id << ',' << s.county_id << ',' << to_string(s.site_type) << ','
        << csv::fmt(s.capacity) << ',' << yes_no(acceptance[j]) << ',' << csv::fmt(load) << ','
        << csv::fmt(solution.medicaid_loads[j]) << ',' << csv::fmt(load / s.capacity) << ','
        << yes_no(solution.closed[j]) << '\n';
  }
}

void write_measures_csv(std::ostream& out, const Dataset& data,
                        std::span<const AccessMeasures> measures) {
  out << "tract_id,program,coverage,assigned_fraction,travel_cost,congestion\n";
  for (const auto& m : measures) {
    out << data.tracts()[m.tract].id << ',' << to_string(m.program) << ','
        << csv::fmt(m.coverage) << ',' << csv::fmt(m.assigned_fraction) << ','
        << opt(m.travel_cost) << ',' << opt(m.congestion) << '\n';
  }
}

void write_diffs_csv(std::ostream& out, const Dataset& data, std::span<const DiffResult> diffs) {
  out << "tract_id,measure,mean_diff,ci_low,ci_high,significant,n_used\n";
  for (const auto& d : diffs) {
    out << data.tracts()[d.tract].id << ',' << to_string(d.measure) << ',';
    if (d.n_used > 0) {
      out << csv::fmt(d.mean_diff) << ',' << csv::fmt(d.ci_low) << ',' << csv::fmt(d.ci_high);
    } else {
      out << ",,";
    }
    out << ',' << yes_no(d.significant) << ',' << d.n_used << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepResult> rows) {
  out << "lever,value,program,measure,mean,std,closures\n";
  for (const auto& r : rows) {
    for (Program p : {Program::medicaid, Program::other}) {
      for (Measure m : kMeasures) {
        const auto& s = r.stats[static_cast<std::size_t>(p)][static_cast<std::size_t>(m)];
        out << to_string(r.lever) << ',' << csv::fmt(r.value) << ',' << to_string(p) << ','
            << to_string(m) << ',' << opt(s.mean) << ',' << (s.mean ? csv::fmt(s.std) : "")
            << ',' << csv::fmt(r.closures) << '\n';
      }
    }
  }
}

void write_svcfit_csv(std::ostream& out, const Dataset& data, const Design& design,
                      const SvcFit& fit, const Bands& bands) {
  out << "tract_id,covariate,beta,lo,hi\n";
  for (Eigen::Index i = 0; i < design.y.size(); ++i) {
    const auto& id = data.tracts()[design.tracts[static_cast<std::size_t>(i)]].id;
    for (Eigen::Index j = 0; j < design.x.cols(); ++j) {
      out << id << ',' << design.names[static_cast<std::size_t>(j)] << ','
          << csv::fmt(fit.beta(i, j)) << ',' << csv::fmt(bands.lo(i, j)) << ','
          << csv::fmt(bands.hi(i, j)) << '\n';
    }
  }
}

std::vector<AccessMeasures> read_measures_csv(std::istream& in, const std::string& name,
                                              const Dataset& data) {
  csv::Reader r{in, name};
  header(r, {"tract_id", "program", "coverage", "assigned_fraction", "travel_cost", "congestion"});
  std::vector<AccessMeasures> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    if (f.size() != 6) throw InputError(r.where() + ": expected 6 fields");
    AccessMeasures m;
    try {
      m.tract = data.tract_index(csv::trim(f[0]));
    } catch (const std::out_of_range&) {
      throw InputError(r.where() + ": unknown tract '" + f[0] + "'");
    }
    const std::string prog = csv::trim(f[1]);
    if (prog == "medicaid") m.program = Program::medicaid;
    else if (prog == "other") m.program = Program::other;
    else throw InputError(r.where() + ": bad program '" + prog + "'");
    m.population = data.tracts()[m.tract].population(m.program);
    m.coverage = number(f[2], r);
    m.coverage_vacuous = m.population <= 0.0;
    m.assigned_fraction = number(f[3], r);
    m.travel_cost = maybe_number(f[4], r);
    m.congestion = maybe_number(f[5], r);
    m.assigned = m.assigned_fraction * m.population;
    out.push_back(m);
  }
  return out;
}

std::vector<DiffRow> read_diffs_csv(std::istream& in, const std::string& name) {
  csv::Reader r{in, name};
  header(r, {"tract_id", "measure", "mean_diff", "ci_low", "ci_high", "significant", "n_used"});
  std::vector<DiffRow> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    if (f.size() != 7) throw InputError(r.where() + ": expected 7 fields");
    DiffRow d;
    d.tract_id = csv::trim(f[0]);
    try {
      d.measure = parse_measure(csv::trim(f[1]));
    } catch (const std::invalid_argument&) {
      throw InputError(r.where() + ": bad measure '" + f[1] + "'");
    }
    d.mean_diff = maybe_number(f[2], r).value_or(0.0);
    d.ci_low = maybe_number(f[3], r).value_or(0.0);
    d.ci_high = maybe_number(f[4], r).value_or(0.0);
    const std::string sig = csv::trim(f[5]);
    if (sig != "true" && sig != "false") throw InputError(r.where() + ": bad flag '" + sig + "'");
    d.significant = sig == "true";
    d.n_used = static_cast<int>(number(f[6], r));
    out.push_back(d);
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

void write_manifest(const fs::path& dir, const Manifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["config"] = m.config;
  j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [path, digest] : m.inputs) j["inputs"][path] = digest;
  j["outputs"] = m.outputs;
  for (const auto& [k, v] : m.extra) j[k] = v;
  j["wall_time_seconds"] = m.wall_time;
  std::ofstream out(dir / "manifest.json");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
}

Manifest read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw InputError("no manifest.json in " + dir.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("manifest.json in " + dir.string() + ": " + e.what());
  }
  Manifest m;
  m.command = j.value("command", "");
  m.config = j.value("config", "");
  m.seed = j.value("seed", std::uint64_t{0});
  m.wall_time = j.value("wall_time_seconds", 0.0);
  if (j.contains("inputs")) {
    for (const auto& [k, v] : j["inputs"].items()) m.inputs[k] = v.get<std::string>();
  }
  if (j.contains("outputs")) m.outputs = j["outputs"].get<std::vector<std::string>>();
  for (const auto& [k, v] : j.items()) {
    if (v.is_string() && k != "command" && k != "config") m.extra[k] = v.get<std::string>();
  }
  return m;
}

void write_text_file(const fs::path& dir, const std::string& name, const std::string& content,
                     Manifest& manifest) {
  std::ofstream out(dir / name, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  manifest.outputs.push_back(name);
}

}  // namespace accessflow::cli
