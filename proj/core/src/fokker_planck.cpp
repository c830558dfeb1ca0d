#include "swarmfield/error.hpp"
#include "swarmfield/mfg.hpp"
#include "transport.hpp"

namespace swarmfield {

DensityFlow fp_forward(const ScalarFlow& w_flow, const DensityField& m0, const MfgConfig& config,
                       FlowStats* stats) {
  config.validate();
  const std::vector<double> times = config.sample_times();
  if (w_flow.size() != times.size()) throw InputError("fp_forward: w_flow has the wrong number of samples");
  for (const auto& w : w_flow) {
    if (!(w.grid() == m0.grid())) throw InputError("fp_forward: w and m0 live on different grids");
  }
  const double factor = config.drift_factor();
  return detail::transport_flow(
      m0, times, config.boundary, config.epsilon, config.cfl,
      [&](std::size_t k) { return detail::potential_velocity(w_flow[k], factor, config.boundary); },
      stats);
}

}  // namespace swarmfield
