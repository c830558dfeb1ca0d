#pragma once

#include <optional>
#include <vector>

#include "swarmfield/attrition.hpp"
#include "swarmfield/grid.hpp"
#include "swarmfield/ot.hpp"

namespace swarmfield {

struct GridSpec {
  double x_min = -5.0, x_max = 5.0, y_min = -5.0, y_max = 5.0;
  int nx = 60, ny = 60;

  Grid make() const { return Grid(x_min, x_max, y_min, y_max, nx, ny); }
};

struct GaussianSpec {
  Point center;
  double variance = 1.0;
};

struct PicardParams {
  double damping = 0.5;  ///< theta in m <- (1 - theta) m_old + theta m_new
  int max_outer = 100;
  double residual_tol = 1e-4;  ///< on the time-summed L1 change of m
};

/// Everything that defines one attacker-defender solve.
struct MfgConfig {
  GridSpec grid;
  double horizon = 10.0;
  int nt = 50;  ///< output samples, t_k = k T / (nt - 1)
  double epsilon = 0.001;
  double alpha = 0.1;
  AttritionParams attacker_attrition{14.0, 5.0};  ///< defenders shooting attackers
  AttritionParams hvu_attrition{1.0, 5.0};        ///< attackers shooting the HVU
  GaussianSpec defenders{{-3.0, -3.0}, 0.85};
  GaussianSpec attackers{{-4.0, 4.0}, 0.85};
  GaussianSpec hvu{{1.0, 1.0}, 0.1};
  Point attacker_target{1.0, 1.0};
  double attacker_gain = 0.4;
  SinkhornParams sinkhorn;
  PicardParams picard;
  /// Defender velocity -Dw / (2 alpha) when on, -Dw when off.
  bool drift_scaling = true;
  Boundary boundary = Boundary::neumann;
  double cfl = 0.25;  ///< advective Courant number of the internal substeps

  void validate() const;
  std::vector<double> sample_times() const;
  double drift_factor() const noexcept { return drift_scaling ? 1.0 / (2.0 * alpha) : 1.0; }
  /// Sinkhorn settings with the transport cost matched to the boundary.
  SinkhornParams ot_params() const {
    SinkhornParams p = sinkhorn;
    p.periodic = boundary == Boundary::periodic;
    return p;
  }
};

using DensityFlow = std::vector<DensityField>;
using ScalarFlow = std::vector<ScalarField>;

/// Counters from the conservative transport steps.
struct FlowStats {
  long substeps = 0;
  long clip_events = 0;  ///< negative cells clamped to zero; zero in a healthy run
  double max_mass_drift = 0.0;
};

/// Forward Fokker-Planck for the attacker population under the homing drift
/// u_att(x) = gain * (target - x), sampled at config.sample_times().
DensityFlow attacker_flow(const MfgConfig& config, FlowStats* stats = nullptr);

/// Backward HJB
///   -w_t - eps Lap w + |Dw|^2 / (4 alpha) = F,  w(T) = 0
/// with F given at the sample instants and linear in time between them.
ScalarFlow hjb_backward(const ScalarFlow& f_flow, const MfgConfig& config);

/// Forward Fokker-Planck for the defenders, drift -drift_factor * Dw with w
/// linear in time between samples.
DensityFlow fp_forward(const ScalarFlow& w_flow, const DensityField& m0, const MfgConfig& config,
                       FlowStats* stats = nullptr);

/// Attrition history up to sample k: squared distances, rates and the
/// attacker survival Q used by the coupling term.
SurvivalTrace survival_trace(std::span<const double> times, std::span<const double> w2_def_att,
                             std::span<const double> w2_att_hvu, const MfgConfig& config);

/// F(t_k, .) = -D(t_k) Q(t_k) d_att'(r_k) phi_k, with D = (1 - alpha) d_h.
/// phi_k is first_variation_w2(mu_k, m_k).
ScalarField coupling_field(std::size_t k, const DensityFlow& m_flow, const DensityFlow& mu_flow,
                           const DensityField& nu_h, const MfgConfig& config,
                           const SurvivalTrace& history);

/// Same as coupling_field with the potential supplied by the caller.
ScalarField coupling_from_potential(std::size_t k, const ScalarField& potential,
                                    const MfgConfig& config, const SurvivalTrace& history);

struct MfgSolution {
  std::vector<double> times;
  DensityFlow m_flow;
  DensityFlow mu_flow;
  ScalarFlow w_flow;
  SurvivalTrace trace;
  std::vector<double> residuals;
  bool converged = false;
  int outer_iterations = 0;
  long clip_events = 0;
  int sinkhorn_failures = 0;  ///< Sinkhorn solves that hit max_iter
  double max_mass_error = 0.0;

  double objective() const { return 1.0 - trace.p.back(); }
};

/// Damped forward-backward fixed point for (w, m).
MfgSolution picard_solve(const MfgConfig& config);

struct BoundsSample {
  double t = 0.0;
  double min_m = 0.0, max_m = 0.0;
  double lower = 0.0, upper = 0.0;
  long violations = 0;
};

struct BoundsReport {
  double k = 0.0;        ///< sup |Lap| of the effective drift potential w * drift_factor
  double k_value = 0.0;  ///< sup |Lap w|
  double min_m0 = 0.0, max_m0 = 0.0;
  double slack = 1.05;
  std::vector<BoundsSample> samples;
  long violation_count = 0;
  double max_violation_ratio = 0.0;  ///< max over samples of max_m/upper and lower/min_m

  bool ok() const noexcept { return violation_count == 0; }
};

struct BoundsOptions {
  double slack = 1.05;
  /// Replaces the computed K, e.g. K/2 to probe detector sensitivity.
  std::optional<double> k_override;
};

/// Two-sided envelope exp(-K t) min m0 <= m(t, x) <= exp(K t) max m0.
BoundsReport verify_bounds(std::span<const double> times, const DensityFlow& m_flow,
                           const ScalarFlow& w_flow, const MfgConfig& config,
                           const BoundsOptions& options = {});
BoundsReport verify_bounds(const MfgSolution& solution, const MfgConfig& config,
                           const BoundsOptions& options = {});

}  // namespace swarmfield
