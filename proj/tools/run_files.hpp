#ifndef ACCESSFLOW_TOOLS_RUN_FILES_HPP
#define ACCESSFLOW_TOOLS_RUN_FILES_HPP

// Output files of the command-line driver.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "accessflow/assignment.hpp"
#include "accessflow/geo.hpp"
#include "accessflow/metrics.hpp"
#include "accessflow/policy.hpp"
#include "accessflow/svc.hpp"

namespace accessflow::cli {

namespace fs = std::filesystem;

/// Run-level problem in an input file (bad CSV, unknown tract id).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_flows_csv(std::ostream& out, const Dataset& data, std::span<const DemandGroup> groups,
                     const AssignmentSolution& solution);
void write_sites_csv(std::ostream& out, const Dataset& data, const AssignmentSolution& solution,
                     const std::vector<bool>& acceptance);
/// tract_id,program,coverage,assigned_fraction,travel_cost,congestion; MISSING is empty.
void write_measures_csv(std::ostream& out, const Dataset& data,
                        std::span<const AccessMeasures> measures);
/// tract_id,measure,mean_diff,ci_low,ci_high,significant,n_used
void write_diffs_csv(std::ostream& out, const Dataset& data, std::span<const DiffResult> diffs);
/// lever,value,program,measure,mean,std,closures
void write_sweep_csv(std::ostream& out, std::span<const SweepResult> rows);
/// tract_id,covariate,beta,lo,hi
void write_svcfit_csv(std::ostream& out, const Dataset& data, const Design& design,
                      const SvcFit& fit, const Bands& bands);

std::vector<AccessMeasures> read_measures_csv(std::istream& in, const std::string& name,
                                              const Dataset& data);

struct DiffRow {
  std::string tract_id;
  Measure measure = Measure::coverage;
  double mean_diff = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool significant = false;
  int n_used = 0;
};
std::vector<DiffRow> read_diffs_csv(std::istream& in, const std::string& name);

std::string sha256_file(const fs::path& path);

struct Manifest {
  std::string command;
  std::string config;                        // snapshot text
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::vector<std::string> outputs;          // file names in the directory
  std::map<std::string, std::string> extra;
  double wall_time = 0.0;
  std::uint64_t seed = 0;
};
void write_manifest(const fs::path& dir, const Manifest& manifest);
Manifest read_manifest(const fs::path& dir);

/// Writes `content` to dir/name and records the name on the manifest.
void write_text_file(const fs::path& dir, const std::string& name, const std::string& content,
                     Manifest& manifest);

}  // namespace accessflow::cli

#endif  // ACCESSFLOW_TOOLS_RUN_FILES_HPP
