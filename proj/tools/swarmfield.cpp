// swarmfield: run attacker/defender mean-field scenarios from presets or YAML.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "swarmfield/error.hpp"
#include "swarmfield/scenario.hpp"

namespace sf = swarmfield;

namespace {

struct Overrides {
  std::string out;
  std::optional<int> grid;
  std::optional<int> nt;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  bool no_snapshots = false;
};

void apply(const Overrides& o, sf::ScenarioConfig& cfg) {
  if (!o.out.empty()) cfg.output.dir = o.out;
  if (o.grid) cfg.mfg.grid.nx = cfg.mfg.grid.ny = *o.grid;
  if (o.nt) cfg.mfg.nt = *o.nt;
  if (o.seed) cfg.oracle.seed = *o.seed;
  if (o.samples) cfg.sweep_samples = *o.samples;
  if (o.no_snapshots) cfg.output.snapshots = false;
}

int report(const sf::RunResult& r) {
  std::cout << r.dir.string() << ": " << r.message << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attacker/defender mean-field game simulator"};
  app.require_subcommand(1);

  Overrides o;
  std::string target;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--grid", o.grid, "Cells per axis")->check(CLI::Range(4, 4096));
    sub->add_option("--nt", o.nt, "Output sample count")->check(CLI::Range(2, 100000));
    sub->add_flag("--no-snapshots", o.no_snapshots, "Skip per-sample field snapshots");
  };

  auto* run = app.add_subcommand("run", "Solve a scenario (preset name or YAML file)");
  run->add_option("scenario", target, "Preset or config path")->required();
  add_common(run);
  run->add_option("--seed", o.seed, "RNG seed for oracle scenarios");

  auto* sweep = app.add_subcommand("sweep", "Distance sweeps; both modes when no target is given");
  sweep->add_option("scenario", target, "Sweep preset or config path");
  add_common(sweep);
  sweep->add_option("--samples", o.samples, "Sweep sample count")->check(CLI::Range(2, 100000));

  auto* oracle = app.add_subcommand("oracle", "Agent-wise simulation and micro/macro consistency check");
  oracle->add_option("scenario", target, "Oracle preset or config path")->required();
  add_common(oracle);
  oracle->add_option("--seed", o.seed, "RNG seed");

  std::string run_dir;
  auto* check = app.add_subcommand("check-bounds", "Re-verify the density envelope of a finished run");
  check->add_option("run-dir", run_dir, "Run output directory")->required();

  auto* list = app.add_subcommand("presets", "List preset scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& n : sf::preset_names()) std::cout << n << '\n';
      return sf::kExitOk;
    }
    if (check->parsed()) return report(sf::check_bounds(run_dir));
    if (sweep->parsed() && target.empty()) {
      int code = sf::kExitOk;
      for (const char* name : {"fig1_translation", "fig1_variance"}) {
        sf::ScenarioConfig cfg = sf::preset(name);
        apply(o, cfg);
        if (!o.out.empty()) cfg.output.dir = std::filesystem::path(o.out) / name;
        code = std::max(code, report(sf::run_distance_sweep(cfg)));
      }
      return code;
    }

    sf::ScenarioConfig cfg = sf::resolve_scenario(target);
    apply(o, cfg);
    if (sweep->parsed()) {
      if (cfg.kind != sf::ScenarioKind::sweep) throw sf::ConfigError(target + " is not a sweep scenario");
      return report(sf::run_distance_sweep(cfg));
    }
    if (oracle->parsed()) {
      if (cfg.kind != sf::ScenarioKind::oracle) throw sf::ConfigError(target + " is not an oracle scenario");
      return report(sf::run_oracle(cfg));
    }
    return report(sf::run(cfg));
  } catch (const sf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sf::kExitConfigError;
  } catch (const sf::SolverDiagnostic& e) {
    std::cerr << "solver diagnostic [" << e.stage() << "]: " << e.what() << '\n';
    return sf::kExitSolverDiagnostic;
  } catch (const sf::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return sf::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
