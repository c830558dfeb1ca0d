#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swarmfield/agents.hpp"
#include "swarmfield/mfg.hpp"
#include "swarmfield/ot.hpp"

namespace swarmfield {

enum class ScenarioKind { mfg, sweep, oracle };

struct OutputOptions {
  std::filesystem::path dir;  ///< empty: runs/<name>
  bool trace = true;
  bool snapshots = true;
  bool residuals = true;
  bool bounds = true;
  int snapshot_stride = 1;
};

/// Point-pair oracle run. Attrition, horizon and grid come from the
/// surrounding scenario.
struct OracleSpec {
  DiracPair pair{{-0.9166666666666666, 0.0833333333333333}, {},
                 {1.0833333333333333, 0.0833333333333333}, {}};
  int samples = 201;
  double dt = 0.01;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

struct ScenarioConfig {
  std::string name = "custom";
  ScenarioKind kind = ScenarioKind::mfg;
  MfgConfig mfg;
  SweepMode sweep_mode = SweepMode::translation;
  double sweep_start = 2.0;
  double sweep_stop = 0.0;
  int sweep_samples = 41;
  OracleSpec oracle;
  OutputOptions output;

  void validate() const;
  SweepSpec sweep_spec() const;
  DiracCheckSpec dirac_spec() const;
  AgentScenario agent_scenario() const;
  std::filesystem::path output_dir() const;
};

/// Parses the YAML schema (sections name, kind, domain, time, physics,
/// attrition, populations, attacker, solver, output, sweep, oracle).
/// Missing keys keep their defaults; unknown keys, type mismatches and
/// out-of-range values raise ConfigError naming the key and line.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Every field, defaults included, in the schema parse_config reads.
std::string emit_config(const ScenarioConfig& cfg);

// -- presets -------------------------------------------------------------------

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
ScenarioConfig preset(const std::string& name);

/// A preset name or a path to a YAML file.
ScenarioConfig resolve_scenario(const std::string& name_or_path);

// -- runs ----------------------------------------------------------------------

enum ExitCode : int {
  kExitOk = 0,
  kExitNotConverged = 2,
  kExitBoundsViolation = 3,
  kExitConfigError = 4,
  kExitSolverDiagnostic = 5,
};

struct RunResult {
  int exit_code = kExitOk;
  std::filesystem::path dir;
  std::optional<MfgSolution> solution;
  std::optional<BoundsReport> bounds;
  std::optional<DistanceTable> table;
  std::optional<DiracReport> dirac;
  std::string message;
};

/// Solves, verifies the envelope and writes resolved_config.yaml (first),
/// trace.csv, residuals.csv, bounds_report.csv, summary.csv and
/// snapshots/{m,mu,w}_NNNN.csv. Solver diagnostics end up in
/// error_report.txt with exit code 5.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Writes sweep_<mode>.csv.
RunResult run_distance_sweep(const ScenarioConfig& cfg);

/// Writes positions.csv, q.csv, p.csv and dirac_report.csv.
RunResult run_oracle(const ScenarioConfig& cfg);

/// Dispatches on cfg.kind.
RunResult run(const ScenarioConfig& cfg);

/// Re-verifies the envelope from a finished run directory's config and
/// snapshots; rewrites bounds_report.csv.
RunResult check_bounds(const std::filesystem::path& run_dir);

// -- csv writers -----------------------------------------------------------------

void write_residuals_csv(std::ostream& os, const std::vector<double>& residuals);
/// Columns t, min_m, max_m, lower_envelope, upper_envelope, violations.
void write_bounds_csv(std::ostream& os, const BoundsReport& report);
void write_summary_csv(std::ostream& os, const MfgSolution& sol, const BoundsReport& report);

}  // namespace swarmfield
