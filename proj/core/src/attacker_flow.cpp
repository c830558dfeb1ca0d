#include "swarmfield/mfg.hpp"
#include "transport.hpp"

namespace swarmfield {

DensityFlow attacker_flow(const MfgConfig& config, FlowStats* stats) {
  config.validate();
  const Grid grid = config.grid.make();
  const DensityField mu0 = gaussian_density(grid, config.attackers.center, config.attackers.variance);
  const detail::FaceVelocity u =
      detail::homing_velocity(grid, config.attacker_target, config.attacker_gain, config.boundary);
  const std::vector<double> times = config.sample_times();
  return detail::transport_flow(mu0, times, config.boundary, config.epsilon, config.cfl,
                                [&](std::size_t) { return u; }, stats);
}

}  // namespace swarmfield
