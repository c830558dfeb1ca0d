#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "swarmfield/error.hpp"
#include "swarmfield/scenario.hpp"

namespace swarmfield {

// -- ScenarioConfig --------------------------------------------------------------

void ScenarioConfig::validate() const {
  if (name.empty()) throw ConfigError("name must not be empty");
  mfg.validate();
  if (output.snapshot_stride < 1) throw ConfigError("output.snapshot_stride must be at least 1");
  if (kind == ScenarioKind::sweep) sweep_spec().validate();
  if (kind == ScenarioKind::oracle) {
    dirac_spec().validate();
    agent_scenario().validate();
  }
}

SweepSpec ScenarioConfig::sweep_spec() const {
  SweepSpec s;
  s.mode = sweep_mode;
  s.start = sweep_start;
  s.stop = sweep_stop;
  s.samples = sweep_samples;
  s.grid = mfg.grid.make();
  s.sinkhorn = mfg.ot_params();
  return s;
}

DiracCheckSpec ScenarioConfig::dirac_spec() const {
  DiracCheckSpec s;
  s.attrition = mfg.attacker_attrition;
  s.pair = oracle.pair;
  s.horizon = mfg.horizon;
  s.samples = oracle.samples;
  s.dt = oracle.dt;
  s.grid = mfg.grid;
  s.sinkhorn = mfg.ot_params();
  return s;
}

AgentScenario ScenarioConfig::agent_scenario() const {
  AgentScenario a;
  a.attackers = {oracle.pair.attacker};
  a.defenders = {oracle.pair.defender};
  a.hvu = mfg.hvu.center;
  a.attacker_drift = constant_drift({oracle.pair.attacker_velocity});
  a.defender_control = constant_control({oracle.pair.defender_velocity});
  a.attrition = mfg.attacker_attrition;
  a.hvu_attrition = mfg.hvu_attrition;
  a.dt = oracle.dt;
  a.horizon = mfg.horizon;
  a.noise = oracle.noise;
  a.seed = oracle.seed;
  return a;
}

std::filesystem::path ScenarioConfig::output_dir() const {
  return output.dir.empty() ? std::filesystem::path("runs") / name : output.dir;
}

// -- parsing ---------------------------------------------------------------------

namespace {

std::string where(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  return m.line >= 0 ? " (line " + std::to_string(m.line + 1) + ")" : "";
}

[[noreturn]] void fail(const std::string& key, const YAML::Node& at, const std::string& msg) {
  throw ConfigError(key + where(at) + ": " + msg);
}

using Check = std::function<const char*(double)>;

Check positive() {
  return [](double v) { return v > 0.0 ? nullptr : "must be positive"; };
}
Check nonnegative() {
  return [](double v) { return v >= 0.0 ? nullptr : "must be nonnegative"; };
}
Check open_unit() {
  return [](double v) { return v > 0.0 && v < 1.0 ? nullptr : "must lie in the open interval (0, 1)"; };
}
Check half_open_unit() {
  return [](double v) { return v > 0.0 && v <= 1.0 ? nullptr : "must lie in (0, 1]"; };
}
Check at_least(double lo, const char* msg) {
  return [lo, msg](double v) { return v >= lo ? nullptr : msg; };
}

// One mapping node of the schema. Reads mark keys as known; finish()
// rejects whatever is left.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(path_, node_, "expected a mapping");
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
  }

  YAML::Node child(const std::string& key) {
    known_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node();
    return node_[key];
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void number(const std::string& key, double& out, const Check& check = {}) {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    double v = 0.0;
    try {
      v = n.as<double>();
    } catch (const YAML::Exception&) {
      fail(key_path(key), n, "expected a number");
    }
    if (!std::isfinite(v)) fail(key_path(key), n, "must be finite");
    if (check) {
      if (const char* msg = check(v)) fail(key_path(key), n, msg);
    }
    out = v;
  }

  void integer(const std::string& key, int& out, const Check& check = {}) {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    int v = 0;
    try {
      v = n.as<int>();
    } catch (const YAML::Exception&) {
      fail(key_path(key), n, "expected an integer");
    }
    if (check) {
      if (const char* msg = check(v)) fail(key_path(key), n, msg);
    }
    out = v;
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    try {
      out = n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(key_path(key), n, "expected a nonnegative integer");
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    try {
      out = n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(key_path(key), n, "expected true or false");
    }
  }

  void text(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    if (!n.IsScalar()) fail(key_path(key), n, "expected a string");
    out = n.Scalar();
  }

  void point(const std::string& key, Point& out) {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    if (!n.IsSequence() || n.size() != 2) fail(key_path(key), n, "expected a pair [x, y]");
    try {
      out = {n[0].as<double>(), n[1].as<double>()};
    } catch (const YAML::Exception&) {
      fail(key_path(key), n, "expected a pair of numbers");
    }
    if (!std::isfinite(out.x) || !std::isfinite(out.y)) fail(key_path(key), n, "must be finite");
  }

  template <class E>
  void choice(const std::string& key, E& out, std::initializer_list<std::pair<const char*, E>> options) {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    const std::string v = n.IsScalar() ? n.Scalar() : std::string();
    std::string allowed;
    for (const auto& [label, value] : options) {
      if (v == label) {
        out = value;
        return;
      }
      allowed += allowed.empty() ? label : std::string(", ") + label;
    }
    fail(key_path(key), n, "expected one of: " + allowed);
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!known_.count(key)) fail(key_path(key), kv.first, "unknown key");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> known_;
};

void read_gaussian(Section& parent, const std::string& key, GaussianSpec& g) {
  Section s(parent.child(key), parent.key_path(key));
  s.point("center", g.center);
  s.number("variance", g.variance, positive());
  s.finish();
}

ScenarioConfig parse_root(const YAML::Node& root) {
  ScenarioConfig cfg;
  MfgConfig& m = cfg.mfg;
  Section top(root, "");
  top.text("name", cfg.name);
  top.choice("kind", cfg.kind,
             {{"mfg", ScenarioKind::mfg}, {"sweep", ScenarioKind::sweep}, {"oracle", ScenarioKind::oracle}});

  {
    Section s(top.child("domain"), "domain");
    s.number("x_min", m.grid.x_min);
    s.number("x_max", m.grid.x_max);
    s.number("y_min", m.grid.y_min);
    s.number("y_max", m.grid.y_max);
    s.integer("nx", m.grid.nx, at_least(4, "must be at least 4"));
    s.integer("ny", m.grid.ny, at_least(4, "must be at least 4"));
    s.choice("boundary", m.boundary, {{"neumann", Boundary::neumann}, {"periodic", Boundary::periodic}});
    s.finish();
  }
  {
    Section s(top.child("time"), "time");
    s.number("horizon", m.horizon, positive());
    s.integer("nt", m.nt, at_least(2, "must be at least 2"));
    s.finish();
  }
  {
    Section s(top.child("physics"), "physics");
    s.number("epsilon", m.epsilon, positive());
    s.number("alpha", m.alpha, open_unit());
    s.boolean("drift_scaling", m.drift_scaling);
    s.finish();
  }
  {
    Section s(top.child("attrition"), "attrition");
    s.number("lambda_a", m.attacker_attrition.lambda, nonnegative());
    s.number("sigma_a", m.attacker_attrition.sigma, positive());
    s.number("lambda_h", m.hvu_attrition.lambda, nonnegative());
    s.number("sigma_h", m.hvu_attrition.sigma, positive());
    s.finish();
  }
  {
    Section s(top.child("populations"), "populations");
    read_gaussian(s, "defenders", m.defenders);
    read_gaussian(s, "attackers", m.attackers);
    read_gaussian(s, "hvu", m.hvu);
    s.finish();
  }
  {
    Section s(top.child("attacker"), "attacker");
    s.point("target", m.attacker_target);
    s.number("gain", m.attacker_gain, nonnegative());
    s.finish();
  }
  {
    Section s(top.child("solver"), "solver");
    s.number("cfl", m.cfl, [](double v) { return v > 0.0 && v <= 0.3 ? nullptr : "must lie in (0, 0.3]"; });
    {
      Section k(s.child("sinkhorn"), "solver.sinkhorn");
      k.number("eps", m.sinkhorn.eps_ot, positive());
      k.integer("max_iter", m.sinkhorn.max_iter, at_least(1, "must be at least 1"));
      k.number("tol", m.sinkhorn.tol, positive());
      k.choice("kernel", m.sinkhorn.kernel,
               {{"separable", SinkhornKernel::separable}, {"dense", SinkhornKernel::dense}});
      k.finish();
    }
    {
      Section p(s.child("picard"), "solver.picard");
      p.number("damping", m.picard.damping, half_open_unit());
      p.integer("max_outer", m.picard.max_outer, at_least(1, "must be at least 1"));
      p.number("residual_tol", m.picard.residual_tol, positive());
      p.finish();
    }
    s.finish();
  }
  {
    Section s(top.child("output"), "output");
    std::string dir = cfg.output.dir.string();
    s.text("dir", dir);
    cfg.output.dir = dir;
    s.boolean("trace", cfg.output.trace);
    s.boolean("snapshots", cfg.output.snapshots);
    s.boolean("residuals", cfg.output.residuals);
    s.boolean("bounds", cfg.output.bounds);
    s.integer("snapshot_stride", cfg.output.snapshot_stride, at_least(1, "must be at least 1"));
    s.finish();
  }
  {
    Section s(top.child("sweep"), "sweep");
    s.choice("mode", cfg.sweep_mode, {{"translation", SweepMode::translation}, {"variance", SweepMode::variance}});
    s.number("start", cfg.sweep_start);
    s.number("stop", cfg.sweep_stop);
    s.integer("samples", cfg.sweep_samples, at_least(2, "must be at least 2"));
    s.finish();
  }
  {
    Section s(top.child("oracle"), "oracle");
    s.point("attacker", cfg.oracle.pair.attacker);
    s.point("attacker_velocity", cfg.oracle.pair.attacker_velocity);
    s.point("defender", cfg.oracle.pair.defender);
    s.point("defender_velocity", cfg.oracle.pair.defender_velocity);
    s.integer("samples", cfg.oracle.samples, at_least(2, "must be at least 2"));
    s.number("dt", cfg.oracle.dt, positive());
    s.number("noise", cfg.oracle.noise, nonnegative());
    s.unsigned64("seed", cfg.oracle.seed);
    s.finish();
  }
  top.finish();

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("malformed configuration (line " + std::to_string(e.mark.line + 1) + "): " + e.msg);
  }
  if (root && !root.IsNull() && !root.IsMap()) throw ConfigError("configuration must be a mapping");
  return parse_root(root);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// -- emission --------------------------------------------------------------------

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void emit_point(YAML::Emitter& e, const char* key, Point p) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << num(p.x) << num(p.y) << YAML::EndSeq;
}

void emit_gaussian(YAML::Emitter& e, const char* key, const GaussianSpec& g) {
  e << YAML::Key << key << YAML::Value << YAML::BeginMap;
  emit_point(e, "center", g.center);
  e << YAML::Key << "variance" << YAML::Value << num(g.variance) << YAML::EndMap;
}

const char* kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::sweep: return "sweep";
    case ScenarioKind::oracle: return "oracle";
    case ScenarioKind::mfg: break;
  }
  return "mfg";
}

}  // namespace

std::string emit_config(const ScenarioConfig& cfg) {
  const MfgConfig& m = cfg.mfg;
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << cfg.name;
  e << YAML::Key << "kind" << YAML::Value << kind_name(cfg.kind);

  e << YAML::Key << "domain" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "x_min" << YAML::Value << num(m.grid.x_min) << YAML::Key << "x_max" << YAML::Value << num(m.grid.x_max);
  e << YAML::Key << "y_min" << YAML::Value << num(m.grid.y_min) << YAML::Key << "y_max" << YAML::Value << num(m.grid.y_max);
  e << YAML::Key << "nx" << YAML::Value << m.grid.nx << YAML::Key << "ny" << YAML::Value << m.grid.ny;
  e << YAML::Key << "boundary" << YAML::Value
    << (m.boundary == Boundary::periodic ? "periodic" : "neumann");
  e << YAML::EndMap;

  e << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "horizon" << YAML::Value << num(m.horizon) << YAML::Key << "nt" << YAML::Value << m.nt;
  e << YAML::EndMap;

  e << YAML::Key << "physics" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "epsilon" << YAML::Value << num(m.epsilon) << YAML::Key << "alpha" << YAML::Value << num(m.alpha);
  e << YAML::Key << "drift_scaling" << YAML::Value << m.drift_scaling;
  e << YAML::EndMap;

  e << YAML::Key << "attrition" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "lambda_a" << YAML::Value << num(m.attacker_attrition.lambda);
  e << YAML::Key << "sigma_a" << YAML::Value << num(m.attacker_attrition.sigma);
  e << YAML::Key << "lambda_h" << YAML::Value << num(m.hvu_attrition.lambda);
  e << YAML::Key << "sigma_h" << YAML::Value << num(m.hvu_attrition.sigma);
  e << YAML::EndMap;

  e << YAML::Key << "populations" << YAML::Value << YAML::BeginMap;
  emit_gaussian(e, "defenders", m.defenders);
  emit_gaussian(e, "attackers", m.attackers);
  emit_gaussian(e, "hvu", m.hvu);
  e << YAML::EndMap;

  e << YAML::Key << "attacker" << YAML::Value << YAML::BeginMap;
  emit_point(e, "target", m.attacker_target);
  e << YAML::Key << "gain" << YAML::Value << num(m.attacker_gain);
  e << YAML::EndMap;

  e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "cfl" << YAML::Value << num(m.cfl);
  e << YAML::Key << "sinkhorn" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "eps" << YAML::Value << num(m.sinkhorn.eps_ot);
  e << YAML::Key << "max_iter" << YAML::Value << m.sinkhorn.max_iter;
  e << YAML::Key << "tol" << YAML::Value << num(m.sinkhorn.tol);
  e << YAML::Key << "kernel" << YAML::Value
    << (m.sinkhorn.kernel == SinkhornKernel::dense ? "dense" : "separable");
  e << YAML::EndMap;
  e << YAML::Key << "picard" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "damping" << YAML::Value << num(m.picard.damping);
  e << YAML::Key << "max_outer" << YAML::Value << m.picard.max_outer;
  e << YAML::Key << "residual_tol" << YAML::Value << num(m.picard.residual_tol);
  e << YAML::EndMap;
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dir" << YAML::Value << cfg.output_dir().string();
  e << YAML::Key << "trace" << YAML::Value << cfg.output.trace;
  e << YAML::Key << "snapshots" << YAML::Value << cfg.output.snapshots;
  e << YAML::Key << "residuals" << YAML::Value << cfg.output.residuals;
  e << YAML::Key << "bounds" << YAML::Value << cfg.output.bounds;
  e << YAML::Key << "snapshot_stride" << YAML::Value << cfg.output.snapshot_stride;
  e << YAML::EndMap;

  e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "mode" << YAML::Value
    << (cfg.sweep_mode == SweepMode::variance ? "variance" : "translation");
  e << YAML::Key << "start" << YAML::Value << num(cfg.sweep_start);
  e << YAML::Key << "stop" << YAML::Value << num(cfg.sweep_stop);
  e << YAML::Key << "samples" << YAML::Value << cfg.sweep_samples;
  e << YAML::EndMap;

  e << YAML::Key << "oracle" << YAML::Value << YAML::BeginMap;
  emit_point(e, "attacker", cfg.oracle.pair.attacker);
  emit_point(e, "attacker_velocity", cfg.oracle.pair.attacker_velocity);
  emit_point(e, "defender", cfg.oracle.pair.defender);
  emit_point(e, "defender_velocity", cfg.oracle.pair.defender_velocity);
  e << YAML::Key << "samples" << YAML::Value << cfg.oracle.samples;
  e << YAML::Key << "dt" << YAML::Value << num(cfg.oracle.dt);
  e << YAML::Key << "noise" << YAML::Value << num(cfg.oracle.noise);
  e << YAML::Key << "seed" << YAML::Value << cfg.oracle.seed;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace swarmfield
