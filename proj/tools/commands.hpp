#ifndef ACCESSFLOW_TOOLS_COMMANDS_HPP
#define ACCESSFLOW_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace accessflow::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

struct SynthOptions {
  std::string preset;  // "georgia" or empty
  std::string params;  // key = value file, or empty
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct AssignOptions {
  std::string data;
  std::string config;
  std::string out;
  int threads = 0;  // 0 = all cores
};

struct SweepOptions {
  std::string data;
  std::string config;
  std::string lever;
  std::string grid;  // comma-separated values
  std::string out;
  int threads = 0;
};

struct SvcOptions {
  std::string data;
  std::string measures;
  std::string spec;
  std::string out;
  int threads = 0;
};

struct ReportOptions {
  std::string run;
  std::string out;
  std::string data;  // overrides the data directory recorded in the run manifest
};

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err);
int cmd_assign(const AssignOptions& o, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err);
int cmd_svc(const SvcOptions& o, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// --threads if given, else ACCESSFLOW_THREADS, else 0.
int resolve_threads(std::optional<int> flag);

}  // namespace accessflow::cli

#endif  // ACCESSFLOW_TOOLS_COMMANDS_HPP
