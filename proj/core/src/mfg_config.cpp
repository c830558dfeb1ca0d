#include <cmath>
#include <string>

#include "swarmfield/error.hpp"
#include "swarmfield/mfg.hpp"

namespace swarmfield {

namespace {

void check_gaussian(const Grid& grid, const GaussianSpec& g, const char* name) {
  if (!(g.variance > 0.0) || !std::isfinite(g.variance)) {
    throw ConfigError(std::string(name) + " variance must be positive");
  }
  if (!grid.contains(g.center)) throw ConfigError(std::string(name) + " center lies outside the domain");
}

}  // namespace

void MfgConfig::validate() const {
  const Grid g = grid.make();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon T must be positive");
  if (nt < 2) throw ConfigError("nt must be at least 2");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  attacker_attrition.validate();
  hvu_attrition.validate();
  check_gaussian(g, defenders, "defender");
  check_gaussian(g, attackers, "attacker");
  check_gaussian(g, hvu, "hvu");
  if (!std::isfinite(attacker_target.x) || !std::isfinite(attacker_target.y)) {
    throw ConfigError("attacker target must be finite");
  }
  if (!(attacker_gain >= 0.0) || !std::isfinite(attacker_gain)) {
    throw ConfigError("attacker gain must be nonnegative");
  }
  sinkhorn.validate();
  if (!(picard.damping > 0.0 && picard.damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  if (picard.max_outer < 1) throw ConfigError("max_outer must be at least 1");
  if (!(picard.residual_tol > 0.0)) throw ConfigError("residual_tol must be positive");
  if (!(cfl > 0.0 && cfl <= 0.3)) throw ConfigError("cfl must lie in (0, 0.3]");
}

std::vector<double> MfgConfig::sample_times() const {
  std::vector<double> t(static_cast<std::size_t>(nt));
  for (int k = 0; k < nt; ++k) t[static_cast<std::size_t>(k)] = horizon * k / (nt - 1);
  t.back() = horizon;
  return t;
}

}  // namespace swarmfield
