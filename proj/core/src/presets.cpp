#include <algorithm>
#include <filesystem>

#include "swarmfield/error.hpp"
#include "swarmfield/scenario.hpp"

namespace swarmfield {

namespace {

// Engagement of the three-panel regime study: defenders (-3, -3), attackers
// from (-4, 4) homing on the HVU at (1, 1).
ScenarioConfig regime(const char* name, double lambda_a, double lambda_h) {
  ScenarioConfig c;
  c.name = name;
  c.mfg.attacker_attrition = {lambda_a, 5.0};
  c.mfg.hvu_attrition = {lambda_h, 5.0};
  c.mfg.defenders = {{-3.0, -3.0}, 0.85};
  c.mfg.attackers = {{-4.0, 4.0}, 0.85};
  c.mfg.hvu = {{1.0, 1.0}, 0.1};
  c.mfg.attacker_target = {1.0, 1.0};
  return c;
}

// Dispersion study: defenders at the origin with a given spread, attackers
// from (-4, 0) to the HVU at (-4, 4).
ScenarioConfig dispersion(const char* name, double variance) {
  ScenarioConfig c;
  c.name = name;
  c.mfg.attacker_attrition = {3.0, 2.0};
  c.mfg.hvu_attrition = {10.0, 2.0};
  c.mfg.defenders = {{0.0, 0.0}, variance};
  c.mfg.attackers = {{-4.0, 0.0}, 1.5};
  c.mfg.hvu = {{-4.0, 4.0}, 0.2};
  c.mfg.attacker_target = {-4.0, 4.0};
  return c;
}

ScenarioConfig sweep(const char* name, SweepMode mode) {
  ScenarioConfig c;
  c.name = name;
  c.kind = ScenarioKind::sweep;
  const SweepSpec s = default_sweep(mode);
  c.sweep_mode = mode;
  c.sweep_start = s.start;
  c.sweep_stop = s.stop;
  c.sweep_samples = s.samples;
  return c;
}

// Point pairs placed on cell centers of the default 60 x 60 grid.
constexpr double kC0 = 0.0833333333333333;  // center of cell 30
constexpr double kCm1 = -0.9166666666666666;
constexpr double kCp1 = 1.0833333333333333;

ScenarioConfig pair(const char* name, DiracPair p, double lambda) {
  ScenarioConfig c;
  c.name = name;
  c.kind = ScenarioKind::oracle;
  c.mfg.attacker_attrition = {lambda, 5.0};
  c.mfg.hvu_attrition = {lambda, 5.0};
  c.mfg.hvu = {{kC0, 2.0 + kC0}, 0.1};
  c.oracle.pair = p;
  return c;
}

struct Entry {
  const char* name;
  ScenarioConfig (*make)();
};

const Entry kPresets[] = {
    {"fig1_translation", [] { return sweep("fig1_translation", SweepMode::translation); }},
    {"fig1_variance", [] { return sweep("fig1_variance", SweepMode::variance); }},
    {"fig2_panel1", [] { return regime("fig2_panel1", 14.0, 1.0); }},
    {"fig2_panel2", [] { return regime("fig2_panel2", 7.0, 7.0); }},
    {"fig2_panel3", [] { return regime("fig2_panel3", 2.0, 7.0); }},
    {"fig3_var0p35", [] { return dispersion("fig3_var0p35", 0.35); }},
    {"fig3_var1p4", [] { return dispersion("fig3_var1p4", 1.4); }},
    {"fig3_var1p8", [] { return dispersion("fig3_var1p8", 1.8); }},
    {"oracle_stationary",
     [] { return pair("oracle_stationary", {{kCm1, kC0}, {}, {kCp1, kC0}, {}}, 1.0); }},
    {"oracle_coincident",
     [] { return pair("oracle_coincident", {{kC0, kC0}, {}, {kC0, kC0}, {}}, 1.0); }},
    {"oracle_diverging",
     [] { return pair("oracle_diverging", {{kC0, kC0}, {-0.25, 0.0}, {kC0, kC0}, {0.25, 0.0}}, 1.0); }},
    {"oracle_zero_attrition",
     [] { return pair("oracle_zero_attrition", {{kCm1, kC0}, {}, {kCp1, kC0}, {}}, 0.0); }},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& e : kPresets) out.emplace_back(e.name);
  return out;
}

bool is_preset(const std::string& name) {
  return std::any_of(std::begin(kPresets), std::end(kPresets),
                     [&](const Entry& e) { return name == e.name; });
}

ScenarioConfig preset(const std::string& name) {
  for (const auto& e : kPresets) {
    if (name == e.name) return e.make();
  }
  throw ConfigError("unknown preset " + name);
}

ScenarioConfig resolve_scenario(const std::string& name_or_path) {
  if (is_preset(name_or_path)) return preset(name_or_path);
  if (std::filesystem::exists(name_or_path)) return load_config(name_or_path);
  throw ConfigError("'" + name_or_path + "' is neither a preset nor a readable file");
}

}  // namespace swarmfield
