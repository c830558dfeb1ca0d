#include <algorithm>
#include <cmath>
#include <limits>

#include "swarmfield/error.hpp"
#include "swarmfield/mfg.hpp"

namespace swarmfield {

BoundsReport verify_bounds(std::span<const double> times, const DensityFlow& m_flow,
                           const ScalarFlow& w_flow, const MfgConfig& config,
                           const BoundsOptions& options) {
  if (m_flow.empty() || m_flow.size() != times.size() || w_flow.size() != times.size()) {
    throw InputError("verify_bounds: flows and times differ in length");
  }
  BoundsReport rep;
  rep.slack = options.slack;
  for (const auto& w : w_flow) {
    rep.k_value = std::max(rep.k_value, laplacian(w, config.boundary).max_abs());
  }
  rep.k = rep.k_value * config.drift_factor();
  const double k = options.k_override.value_or(rep.k);
  rep.min_m0 = m_flow.front().min();
  rep.max_m0 = m_flow.front().max();

  for (std::size_t s = 0; s < times.size(); ++s) {
    const DensityField& m = m_flow[s];
    BoundsSample b;
    b.t = times[s];
    b.min_m = m.min();
    b.max_m = m.max();
    b.lower = std::exp(-k * b.t) * rep.min_m0;
    b.upper = std::exp(k * b.t) * rep.max_m0;
    const double lo = b.lower / rep.slack, hi = b.upper * rep.slack;
    for (double v : m.values()) b.violations += (v < lo || v > hi);
    rep.violation_count += b.violations;
    double ratio = b.upper > 0.0 ? b.max_m / b.upper : 0.0;
    if (b.lower > 0.0) {
      ratio = std::max(ratio, b.min_m > 0.0 ? b.lower / b.min_m
                                            : std::numeric_limits<double>::infinity());
    }
    rep.max_violation_ratio = std::max(rep.max_violation_ratio, ratio);
    rep.samples.push_back(b);
  }
  return rep;
}

BoundsReport verify_bounds(const MfgSolution& solution, const MfgConfig& config,
                           const BoundsOptions& options) {
  return verify_bounds(solution.times, solution.m_flow, solution.w_flow, config, options);
}

}  // namespace swarmfield
