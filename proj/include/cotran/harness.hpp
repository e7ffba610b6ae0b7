#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cotran/report.hpp"
#include "json.hpp"

namespace cotran::harness {

using Json = nlohmann::ordered_json;

// Command-line options, already parsed.
struct Options {
  std::string spec_path;
  std::string out_path;     // empty: report goes to stdout
  std::string csv_path;     // empty: no trajectory dump
  std::string replay_path;  // set: replay this report against the spec
  std::optional<int> radius;
  std::optional<std::uint64_t> seed;
  std::map<std::string, double> tol_overrides;
  bool list_laws = false;
};

// A validated problem spec: the raw document plus the resolved knobs.
struct ProblemSpec {
  Json doc;
  std::string command;
  int radius = 4;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // defaults, then file, then CLI
  int max_dim = 16;                          // COTRANS_MAX_DIM cap
};

// Parses and validates the JSON document against the shipped schema and the
// cross-field rules; named-field diagnostics are thrown as SpecError.
ProblemSpec spec_from_json(const Json& doc, const Options& opt);
ProblemSpec load_spec(const std::string& path, const Options& opt);

// Validates `doc` against the structural schema subset (type, required,
// properties, enum, items, minimum, minItems, additionalProperties).  The
// first violation is reported with its JSON path.
void validate_against_schema(const Json& doc, const Json& schema);
// The schema document compiled into the binary (also shipped in schema/).
const Json& problem_spec_schema();

// Outcome of one spec execution.
struct RunResult {
  VerificationReport report;
  std::string command;
  Json artifacts;   // command-specific extras (completion tables, ...)
  std::string csv;  // trajectory rows, empty unless an evolution grid ran
  int exit_code = 0;
  // Per-law re-evaluators: given a recorded entry (worst location + metrics),
  // recompute its residual against the freshly built objects.
  std::map<std::string, std::function<double(const LawEntry&)>> replayers;
};

RunResult execute(const ProblemSpec& spec);

Json report_to_json(const RunResult& result, const ProblemSpec& spec);

// Re-evaluates every recorded worst location of `report_doc` against a fresh
// execution of `spec`; true iff every residual reproduces within 1e-12.
// A report written by a different schema version raises SpecError.
bool replay(const Json& report_doc, const ProblemSpec& spec, std::string* why = nullptr);

struct LawInfo {
  std::string id;
  double default_tol = 0.0;
  bool informational = false;  // entry never fails on its own
  std::string summary;
};
const std::vector<LawInfo>& known_laws();
// Tolerance keys accepted by --tol and the "tolerances" spec block.
const std::map<std::string, double>& default_tolerances();

// Full CLI behavior; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace cotran::harness
