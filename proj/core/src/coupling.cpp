#include <algorithm>

#include "swarmfield/error.hpp"
#include "swarmfield/mfg.hpp"

namespace swarmfield {

SurvivalTrace survival_trace(std::span<const double> times, std::span<const double> w2_def_att,
                             std::span<const double> w2_att_hvu, const MfgConfig& config) {
  if (w2_def_att.size() != times.size() || w2_att_hvu.size() != times.size()) {
    throw InputError("survival_trace: distance series and times differ in length");
  }
  SurvivalTrace tr;
  tr.times.assign(times.begin(), times.end());
  tr.w2_def_att.assign(w2_def_att.begin(), w2_def_att.end());
  tr.w2_att_hvu.assign(w2_att_hvu.begin(), w2_att_hvu.end());
  for (std::size_t k = 0; k < times.size(); ++k) {
    tr.d_att.push_back(attrition_rate(config.attacker_attrition, std::max(0.0, w2_def_att[k])));
    tr.d_h.push_back(attrition_rate(config.hvu_attrition, std::max(0.0, w2_att_hvu[k])));
  }
  tr.q = survival_q(tr.d_att, tr.times);
  tr.p = survival_p(tr.d_h, tr.q, tr.times);
  return tr;
}

ScalarField coupling_from_potential(std::size_t k, const ScalarField& potential,
                                    const MfgConfig& config, const SurvivalTrace& history) {
  if (k >= history.size()) throw InputError("coupling: attrition history does not reach sample k");
  const double d_weight = (1.0 - config.alpha) * history.d_h[k];
  const double slope =
      attrition_rate_derivative(config.attacker_attrition, std::max(0.0, history.w2_def_att[k]));
  const double scale = -d_weight * history.q[k] * slope;
  ScalarField f(potential.grid());
  auto out = f.values();
  const auto phi = potential.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * phi[i];
  return f;
}

ScalarField coupling_field(std::size_t k, const DensityFlow& m_flow, const DensityFlow& mu_flow,
                           const DensityField& nu_h, const MfgConfig& config,
                           const SurvivalTrace& history) {
  if (k >= m_flow.size() || k >= mu_flow.size()) throw InputError("coupling: sample index out of range");
  if (!(nu_h.grid() == m_flow[k].grid())) throw InputError("coupling: nu_h lives on a different grid");
  // D(t_k) comes from the recorded HVU distance; nu_h only fixes the grid.
  const ScalarField phi = first_variation_w2(mu_flow[k], m_flow[k], config.ot_params());
  return coupling_from_potential(k, phi, config, history);
}

}  // namespace swarmfield
