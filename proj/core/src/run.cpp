#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "swarmfield/error.hpp"
#include "swarmfield/field_io.hpp"
#include "swarmfield/scenario.hpp"

namespace swarmfield {

namespace fs = std::filesystem;

namespace {

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  writer(out);
  if (!out) throw Error("failed while writing " + path.string());
}

fs::path start_run(const ScenarioConfig& cfg) {
  cfg.validate();
  const fs::path dir = cfg.output_dir();
  fs::create_directories(dir);
  write_file(dir / "resolved_config.yaml", [&](std::ostream& os) { os << emit_config(cfg); });
  return dir;
}

std::string snapshot_name(const char* prefix, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu.csv", prefix, k);
  return buf;
}

// Sample indices kept at a stride; the last sample is always included.
std::vector<std::size_t> strided(std::size_t n, int stride) {
  std::vector<std::size_t> ks;
  for (std::size_t k = 0; k < n; k += static_cast<std::size_t>(stride)) ks.push_back(k);
  if (ks.back() != n - 1) ks.push_back(n - 1);
  return ks;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  RunResult res;
  res.dir = start_run(cfg);

  MfgSolution sol;
  try {
    sol = picard_solve(cfg.mfg);
  } catch (const SolverDiagnostic& e) {
    write_file(res.dir / "error_report.txt", [&](std::ostream& os) {
      os << "stage: " << e.stage() << "\nstep: " << e.step() << "\nmessage: " << e.what() << '\n';
    });
    res.exit_code = kExitSolverDiagnostic;
    res.message = e.what();
    return res;
  }
  const BoundsReport bounds = verify_bounds(sol, cfg.mfg);

  const OutputOptions& out = cfg.output;
  if (out.trace) write_file(res.dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, sol.trace); });
  if (out.residuals) {
    write_file(res.dir / "residuals.csv", [&](std::ostream& os) { write_residuals_csv(os, sol.residuals); });
  }
  if (out.bounds) {
    write_file(res.dir / "bounds_report.csv", [&](std::ostream& os) { write_bounds_csv(os, bounds); });
  }
  write_file(res.dir / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, sol, bounds); });
  if (out.snapshots) {
    const fs::path snap = res.dir / "snapshots";
    fs::create_directories(snap);
    for (std::size_t k : strided(sol.times.size(), out.snapshot_stride)) {
      write_field_csv(snap / snapshot_name("m", k), sol.m_flow[k].as_scalar(), sol.times[k]);
      write_field_csv(snap / snapshot_name("mu", k), sol.mu_flow[k].as_scalar(), sol.times[k]);
      write_field_csv(snap / snapshot_name("w", k), sol.w_flow[k], sol.times[k]);
    }
  }

  std::ostringstream msg;
  msg << "P(T)=" << sol.trace.p.back() << " Q(T)=" << sol.trace.q.back() << " iterations "
      << sol.outer_iterations << (sol.converged ? " (converged)" : " (not converged)")
      << ", envelope violations " << bounds.violation_count;
  res.message = msg.str();
  if (!sol.converged) {
    res.exit_code = kExitNotConverged;
  } else if (!bounds.ok()) {
    res.exit_code = kExitBoundsViolation;
  }
  res.bounds = bounds;
  res.solution = std::move(sol);
  return res;
}

RunResult run_distance_sweep(const ScenarioConfig& cfg) {
  RunResult res;
  res.dir = start_run(cfg);
  const SweepSpec spec = cfg.sweep_spec();
  DistanceTable table = distance_sweep(spec);
  const char* file = spec.mode == SweepMode::variance ? "sweep_variance.csv" : "sweep_translation.csv";
  write_file(res.dir / file, [&](std::ostream& os) { write_table_csv(os, table); });
  res.message = std::to_string(table.rows.size()) + " samples written to " + (res.dir / file).string();
  res.table = std::move(table);
  return res;
}

RunResult run_oracle(const ScenarioConfig& cfg) {
  RunResult res;
  res.dir = start_run(cfg);
  const AgentTrace trace = simulate_agents(cfg.agent_scenario());
  write_file(res.dir / "positions.csv", [&](std::ostream& os) { write_positions_csv(os, trace); });
  write_file(res.dir / "q.csv", [&](std::ostream& os) { write_q_csv(os, trace); });
  write_file(res.dir / "p.csv", [&](std::ostream& os) { write_p_csv(os, trace); });

  DiracReport report = dirac_consistency_check(cfg.dirac_spec());
  write_file(res.dir / "dirac_report.csv", [&](std::ostream& os) { write_dirac_report_csv(os, report); });
  std::ostringstream msg;
  msg << "max relative deviation of Q between agent-wise and population-wise models: "
      << report.max_rel_deviation;
  res.message = msg.str();
  res.dirac = std::move(report);
  return res;
}

RunResult run(const ScenarioConfig& cfg) {
  switch (cfg.kind) {
    case ScenarioKind::sweep: return run_distance_sweep(cfg);
    case ScenarioKind::oracle: return run_oracle(cfg);
    case ScenarioKind::mfg: break;
  }
  return run_scenario(cfg);
}

RunResult check_bounds(const fs::path& run_dir) {
  const ScenarioConfig cfg = load_config(run_dir / "resolved_config.yaml");
  const fs::path snap = run_dir / "snapshots";
  if (!fs::is_directory(snap)) throw InputError(run_dir.string() + " has no snapshots directory");

  std::vector<fs::path> m_files;
  for (const auto& entry : fs::directory_iterator(snap)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("m_", 0) == 0 && entry.path().extension() == ".csv") m_files.push_back(entry.path());
  }
  if (m_files.empty()) throw InputError(snap.string() + " holds no density snapshots");
  std::sort(m_files.begin(), m_files.end());

  std::vector<double> times;
  DensityFlow m_flow;
  ScalarFlow w_flow;
  for (const auto& mf : m_files) {
    const fs::path wf = snap / ("w_" + mf.filename().string().substr(2));
    if (!fs::exists(wf)) throw InputError("missing value snapshot " + wf.string());
    FieldSnapshot m = read_field_csv(mf);
    FieldSnapshot w = read_field_csv(wf);
    times.push_back(m.t);
    m_flow.emplace_back(std::move(m.field));
    w_flow.push_back(std::move(w.field));
  }

  RunResult res;
  res.dir = run_dir;
  const BoundsReport bounds = verify_bounds(times, m_flow, w_flow, cfg.mfg);
  write_file(run_dir / "bounds_report.csv", [&](std::ostream& os) { write_bounds_csv(os, bounds); });
  std::ostringstream msg;
  msg << "K=" << bounds.k << " over " << times.size() << " samples, violations "
      << bounds.violation_count;
  res.message = msg.str();
  res.exit_code = bounds.ok() ? kExitOk : kExitBoundsViolation;
  res.bounds = bounds;
  return res;
}

}  // namespace swarmfield
