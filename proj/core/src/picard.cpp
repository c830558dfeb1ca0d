#include <algorithm>
#include <cmath>
#include <optional>

#include "swarmfield/mfg.hpp"

namespace swarmfield {

namespace {

DensityField blend(const DensityField& old_m, const DensityField& new_m, double theta) {
  std::vector<double> v(old_m.size());
  const auto a = old_m.values(), b = new_m.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = (1.0 - theta) * a[k] + theta * b[k];
  return DensityField(old_m.grid(), std::move(v));
}

double mass_error(const DensityFlow& flow) {
  double err = 0.0;
  for (const auto& d : flow) err = std::max(err, std::abs(integrate(d) - 1.0));
  return err;
}

// Divergences S(mu_k, m_k) along a flow; each sample warm-starts from its own
// previous solve, or from its predecessor in time on the first pass.
class DivergenceTrack {
 public:
  DivergenceTrack(std::size_t n, const SinkhornParams& params) : params_(params), cache_(n) {}

  const SinkhornDivergence& solve(std::size_t k, const DensityField& mu, const DensityField& m,
                                  const SinkhornResult& mu_self) {
    const SinkhornDivergence* warm = nullptr;
    if (cache_[k]) {
      warm = &*cache_[k];
    } else if (k > 0 && cache_[k - 1]) {
      warm = &*cache_[k - 1];
    }
    SinkhornDivergence d = sinkhorn_divergence(mu, m, params_, mu_self, warm);
    if (!d.cross.converged || !d.target_self.converged) ++failures_;
    cache_[k] = std::move(d);
    return *cache_[k];
  }

  int failures() const noexcept { return failures_; }

 private:
  SinkhornParams params_;
  std::vector<std::optional<SinkhornDivergence>> cache_;
  int failures_ = 0;
};

}  // namespace

MfgSolution picard_solve(const MfgConfig& config) {
  config.validate();
  const Grid grid = config.grid.make();
  const std::vector<double> times = config.sample_times();
  const std::size_t nt = times.size();
  const double theta = config.picard.damping;

  MfgSolution sol;
  sol.times = times;
  FlowStats stats;
  sol.mu_flow = attacker_flow(config, &stats);

  // Everything that depends on mu alone is solved once.
  const DensityField nu_h = gaussian_density(grid, config.hvu.center, config.hvu.variance);
  const SinkhornResult nu_self = sinkhorn_self(nu_h, config.ot_params());
  std::vector<double> w2_hvu(nt);
  std::vector<SinkhornResult> mu_self;
  mu_self.reserve(nt);
  DivergenceTrack hvu_track(nt, config.ot_params());
  for (std::size_t k = 0; k < nt; ++k) {
    const SinkhornDivergence& d = hvu_track.solve(k, nu_h, sol.mu_flow[k], nu_self);
    w2_hvu[k] = std::max(0.0, d.value);
    mu_self.push_back(d.target_self);
  }
  if (!nu_self.converged) ++sol.sinkhorn_failures;

  const DensityField m0 = gaussian_density(grid, config.defenders.center, config.defenders.variance);
  DensityFlow m = fp_forward(ScalarFlow(nt, ScalarField(grid)), m0, config, &stats);

  // F vanishes identically when either weapon is off.
  const bool coupled = config.attacker_attrition.lambda > 0.0 && config.hvu_attrition.lambda > 0.0;
  DivergenceTrack track(nt, config.ot_params());
  std::vector<double> w2_att(nt, 0.0);
  ScalarFlow f_flow(nt, ScalarField(grid));
  ScalarFlow w_flow(nt, ScalarField(grid));

  for (int outer = 1; outer <= config.picard.max_outer; ++outer) {
    if (coupled) {
      // Lagged coupling: distances, Q and potentials all come from the
      // current iterate m.
      std::vector<const SinkhornDivergence*> divs(nt);
      for (std::size_t k = 0; k < nt; ++k) {
        divs[k] = &track.solve(k, sol.mu_flow[k], m[k], mu_self[k]);
        w2_att[k] = std::max(0.0, divs[k]->value);
      }
      const SurvivalTrace history = survival_trace(times, w2_att, w2_hvu, config);
      for (std::size_t k = 0; k < nt; ++k) {
        f_flow[k] = coupling_from_potential(k, divs[k]->potential, config, history);
      }
    }
    w_flow = hjb_backward(f_flow, config);
    const DensityFlow m_new = fp_forward(w_flow, m0, config, &stats);

    double residual = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      residual += theta * l1_distance(m_new[k], m[k]);
      m[k] = blend(m[k], m_new[k], theta);
    }
    sol.residuals.push_back(residual);
    sol.outer_iterations = outer;
    if (residual <= config.picard.residual_tol) {
      sol.converged = true;
      break;
    }
  }

  for (std::size_t k = 0; k < nt; ++k) {
    w2_att[k] = std::max(0.0, track.solve(k, sol.mu_flow[k], m[k], mu_self[k]).value);
  }
  sol.trace = survival_trace(times, w2_att, w2_hvu, config);
  sol.m_flow = std::move(m);
  sol.w_flow = std::move(w_flow);
  sol.clip_events = stats.clip_events;
  sol.sinkhorn_failures += track.failures() + hvu_track.failures();
  sol.max_mass_error = std::max(mass_error(sol.m_flow), mass_error(sol.mu_flow));
  return sol;
}

}  // namespace swarmfield
