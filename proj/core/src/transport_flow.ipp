#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "swarmfield/error.hpp"

namespace swarmfield::detail {

template <class VelocityAt>
DensityFlow transport_flow(const DensityField& m0, std::span<const double> times, Boundary bc,
                           double epsilon, double cfl, VelocityAt&& velocity, FlowStats* stats) {
  const Grid& grid = m0.grid();
  Transport transport(grid, bc, epsilon);
  const double mass0 = integrate(m0);

  DensityFlow flow;
  flow.reserve(times.size());
  flow.push_back(m0);
  std::vector<double> m(m0.values().begin(), m0.values().end());

  FlowStats local;
  FaceVelocity u_lo = velocity(std::size_t{0});
  for (std::size_t k = 1; k < times.size(); ++k) {
    FaceVelocity u_hi = velocity(k);
    const double span = times[k] - times[k - 1];
    const double rate = std::max(u_lo.courant_rate(grid.dx(), grid.dy()),
                                 u_hi.courant_rate(grid.dx(), grid.dy()));
    const long n = std::max(1L, static_cast<long>(std::ceil(span * rate / cfl)));
    const double dt = span / static_cast<double>(n);
    for (long s = 0; s < n; ++s) {
      const double frac = (static_cast<double>(s) + 0.5) / static_cast<double>(n);
      transport.step(m, lerp(u_lo, u_hi, frac), dt);
    }
    local.substeps += n;

    for (double v : m) {
      if (!std::isfinite(v)) {
        throw SolverDiagnostic("transport produced a non-finite density at sample " +
                                   std::to_string(k),
                               "fokker_planck", static_cast<int>(k));
      }
    }
    DensityField snap(grid, m);
    local.max_mass_drift = std::max(local.max_mass_drift, std::abs(integrate(snap) - mass0));
    flow.push_back(std::move(snap));
    u_lo = std::move(u_hi);
  }
  local.clip_events = transport.clip_events();
  if (stats) {
    stats->substeps += local.substeps;
    stats->clip_events += local.clip_events;
    stats->max_mass_drift = std::max(stats->max_mass_drift, local.max_mass_drift);
  }
  return flow;
}

}  // namespace swarmfield::detail
