#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "swarmfield/attrition.hpp"
#include "swarmfield/grid.hpp"
#include "swarmfield/mfg.hpp"
#include "swarmfield/ot.hpp"

namespace swarmfield {

/// Velocity of attacker i at time t and position s.
using AttackerDrift = std::function<Point(double t, Point s, std::size_t i)>;
/// Velocity command for defender k at time t and position x.
using DefenderControl = std::function<Point(double t, Point x, std::size_t k)>;

/// ds = gain * (target - s) dt.
AttackerDrift homing_drift(Point target, double gain);
/// Constant velocity per agent; agents beyond the list stand still.
AttackerDrift constant_drift(std::vector<Point> velocities);
DefenderControl constant_control(std::vector<Point> velocities);

/// Finite attacker/defender engagement with explicit survival ODEs.
struct AgentScenario {
  std::vector<Point> attackers;  ///< initial positions s_i(0)
  std::vector<Point> defenders;  ///< initial positions x_k(0)
  Point hvu;
  AttackerDrift attacker_drift;        ///< null: attackers stand still
  DefenderControl defender_control;    ///< null: defenders stand still
  AttritionParams attrition{1.0, 1.0};      ///< defender k on attacker i, every pair
  AttritionParams hvu_attrition{1.0, 1.0};  ///< attacker i on the HVU
  /// Optional per-pair overrides, row-major [i * n_defenders + k].
  std::vector<AttritionParams> pair_attrition;
  /// Optional per-attacker overrides of hvu_attrition.
  std::vector<AttritionParams> attacker_hvu_attrition;
  double dt = 0.01;
  double horizon = 10.0;
  double noise = 0.0;  ///< per-axis diffusion amplitude; sqrt(2 eps) mirrors the PDE model
  std::uint64_t seed = 0;

  void validate() const;
};

struct AgentTrace {
  std::vector<double> times;
  std::vector<std::vector<Point>> attackers;  ///< [step][i]
  std::vector<std::vector<Point>> defenders;  ///< [step][k]
  std::vector<std::vector<double>> q_pair;    ///< [step][i * n_defenders + k]
  std::vector<std::vector<double>> q;         ///< [step][i], product over k
  std::vector<double> p;

  std::size_t n_attackers() const noexcept { return attackers.empty() ? 0 : attackers[0].size(); }
  std::size_t n_defenders() const noexcept { return defenders.empty() ? 0 : defenders[0].size(); }
};

/// Euler (Euler-Maruyama when noise > 0) integration of positions with
///   Q_ik = exp(-int d_att(|s_i - x_k|^2)),  Q_i = prod_k Q_ik,
///   P = exp(-int sum_i d_H(|s_i - s_H|^2) Q_i),
/// all integrals trapezoidal on the step grid. The horizon is split into
/// ceil(T / dt) equal steps.
AgentTrace simulate_agents(const AgentScenario& scn);

/// Long format `t,kind,id,x,y`.
void write_positions_csv(std::ostream& os, const AgentTrace& trace);
/// `t,Q_0,...,Q_{n-1}`.
void write_q_csv(std::ostream& os, const AgentTrace& trace);
/// `t,P`.
void write_p_csv(std::ostream& os, const AgentTrace& trace);

/// One attacker and one defender in straight-line motion.
struct DiracPair {
  Point attacker;
  Point attacker_velocity;
  Point defender;
  Point defender_velocity;
};

struct DiracCheckSpec {
  AttritionParams attrition{1.0, 5.0};
  DiracPair pair;
  double horizon = 10.0;
  int samples = 201;
  double dt = 0.01;  ///< agent-wise step
  GridSpec grid;
  SinkhornParams sinkhorn;

  void validate() const;
};

struct DiracReport {
  std::vector<double> times;
  std::vector<double> q_agent;
  std::vector<double> q_population;
  std::vector<double> w2_population;  ///< squared W2 between the snapped single-cell densities
  std::vector<double> distance_sq;    ///< exact squared distance between the agents
  double max_rel_deviation = 0.0;
};

/// Agent-wise Q(t) against survival_q driven by the Sinkhorn W2 between
/// single-cell densities that follow the same trajectories.
DiracReport dirac_consistency_check(const DiracCheckSpec& spec);

/// Columns t, d2_agent, w2_population, Q_agent, Q_population, rel_dev.
void write_dirac_report_csv(std::ostream& os, const DiracReport& report);

}  // namespace swarmfield
