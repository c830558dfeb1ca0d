#include "swarmfield/agents.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "swarmfield/error.hpp"
#include "swarmfield/field_io.hpp"

namespace swarmfield {

namespace {

double dist_sq(Point a, Point b) noexcept {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

void check_point(Point p, const char* what) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ConfigError(std::string(what) + " must be finite");
}

}  // namespace

AttackerDrift homing_drift(Point target, double gain) {
  return [target, gain](double, Point s, std::size_t) {
    return Point{gain * (target.x - s.x), gain * (target.y - s.y)};
  };
}

AttackerDrift constant_drift(std::vector<Point> velocities) {
  return [v = std::move(velocities)](double, Point, std::size_t i) {
    return i < v.size() ? v[i] : Point{};
  };
}

DefenderControl constant_control(std::vector<Point> velocities) {
  return [v = std::move(velocities)](double, Point, std::size_t k) {
    return k < v.size() ? v[k] : Point{};
  };
}

void AgentScenario::validate() const {
  if (attackers.empty()) throw ConfigError("agent scenario needs at least one attacker");
  if (defenders.empty()) throw ConfigError("agent scenario needs at least one defender");
  for (const auto& p : attackers) check_point(p, "attacker position");
  for (const auto& p : defenders) check_point(p, "defender position");
  check_point(hvu, "hvu position");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("agent dt must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("agent horizon must be positive");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("agent noise must be nonnegative");
  attrition.validate();
  hvu_attrition.validate();
  if (!pair_attrition.empty() && pair_attrition.size() != attackers.size() * defenders.size()) {
    throw ConfigError("pair attrition table must have n_attackers * n_defenders entries");
  }
  if (!attacker_hvu_attrition.empty() && attacker_hvu_attrition.size() != attackers.size()) {
    throw ConfigError("per-attacker hvu attrition must have n_attackers entries");
  }
  for (const auto& p : pair_attrition) p.validate();
  for (const auto& p : attacker_hvu_attrition) p.validate();
}

AgentTrace simulate_agents(const AgentScenario& scn) {
  scn.validate();
  const std::size_t na = scn.attackers.size(), nd = scn.defenders.size();
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(scn.horizon / scn.dt - 1e-9)));
  const double dt = scn.horizon / static_cast<double>(steps);
  const double kick = scn.noise * std::sqrt(dt);

  auto pair = [&](std::size_t i, std::size_t k) -> const AttritionParams& {
    return scn.pair_attrition.empty() ? scn.attrition : scn.pair_attrition[i * nd + k];
  };
  auto on_hvu = [&](std::size_t i) -> const AttritionParams& {
    return scn.attacker_hvu_attrition.empty() ? scn.hvu_attrition : scn.attacker_hvu_attrition[i];
  };

  std::mt19937_64 rng(scn.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  AgentTrace tr;
  tr.times.reserve(steps + 1);
  std::vector<Point> s = scn.attackers, x = scn.defenders;
  std::vector<double> rate_pair(na * nd), log_q_pair(na * nd, 0.0);
  std::vector<double> q(na, 1.0);
  double hvu_rate = 0.0, log_p = 0.0;

  // Integrand values at the current step; trapezoid uses the previous ones.
  auto rates = [&](std::vector<double>& pr, double& hr, const std::vector<double>& qi) {
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t k = 0; k < nd; ++k) pr[i * nd + k] = attrition_rate(pair(i, k), dist_sq(s[i], x[k]));
    }
    hr = 0.0;
    for (std::size_t i = 0; i < na; ++i) hr += attrition_rate(on_hvu(i), dist_sq(s[i], scn.hvu)) * qi[i];
  };
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.attackers.push_back(s);
    tr.defenders.push_back(x);
    std::vector<double> qp(na * nd);
    for (std::size_t j = 0; j < qp.size(); ++j) qp[j] = std::exp(log_q_pair[j]);
    tr.q_pair.push_back(std::move(qp));
    tr.q.push_back(q);
    tr.p.push_back(std::exp(log_p));
  };

  rates(rate_pair, hvu_rate, q);
  record(0.0);
  std::vector<double> next_pair(na * nd);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = dt * static_cast<double>(n);
    std::vector<Point> s_next = s, x_next = x;
    for (std::size_t i = 0; i < na; ++i) {
      const Point v = scn.attacker_drift ? scn.attacker_drift(t, s[i], i) : Point{};
      s_next[i].x += dt * v.x;
      s_next[i].y += dt * v.y;
    }
    for (std::size_t k = 0; k < nd; ++k) {
      const Point v = scn.defender_control ? scn.defender_control(t, x[k], k) : Point{};
      x_next[k].x += dt * v.x;
      x_next[k].y += dt * v.y;
    }
    if (kick > 0.0) {
      for (auto& p : s_next) {
        p.x += kick * normal(rng);
        p.y += kick * normal(rng);
      }
      for (auto& p : x_next) {
        p.x += kick * normal(rng);
        p.y += kick * normal(rng);
      }
    }
    s = std::move(s_next);
    x = std::move(x_next);

    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t k = 0; k < nd; ++k) next_pair[i * nd + k] = attrition_rate(pair(i, k), dist_sq(s[i], x[k]));
    }
    for (std::size_t j = 0; j < next_pair.size(); ++j) {
      log_q_pair[j] -= 0.5 * dt * (rate_pair[j] + next_pair[j]);
    }
    // Q_i as a sum of logs keeps the product exact to round-off.
    for (std::size_t i = 0; i < na; ++i) {
      double lq = 0.0;
      for (std::size_t k = 0; k < nd; ++k) lq += log_q_pair[i * nd + k];
      q[i] = std::exp(lq);
    }
    double hvu_next = 0.0;
    for (std::size_t i = 0; i < na; ++i) hvu_next += attrition_rate(on_hvu(i), dist_sq(s[i], scn.hvu)) * q[i];
    log_p -= 0.5 * dt * (hvu_rate + hvu_next);
    rate_pair.swap(next_pair);
    hvu_rate = hvu_next;
    record(n + 1 == steps ? scn.horizon : dt * static_cast<double>(n + 1));
  }
  return tr;
}

void write_positions_csv(std::ostream& os, const AgentTrace& trace) {
  os << kCsvVersionLine << "\nt,kind,id,x,y\n" << std::setprecision(12);
  for (std::size_t n = 0; n < trace.times.size(); ++n) {
    for (std::size_t i = 0; i < trace.attackers[n].size(); ++i) {
      os << trace.times[n] << ",att," << i << ',' << trace.attackers[n][i].x << ',' << trace.attackers[n][i].y << '\n';
    }
    for (std::size_t k = 0; k < trace.defenders[n].size(); ++k) {
      os << trace.times[n] << ",def," << k << ',' << trace.defenders[n][k].x << ',' << trace.defenders[n][k].y << '\n';
    }
  }
}

void write_q_csv(std::ostream& os, const AgentTrace& trace) {
  os << kCsvVersionLine << "\nt";
  for (std::size_t i = 0; i < trace.n_attackers(); ++i) os << ",Q_" << i;
  os << '\n' << std::setprecision(12);
  for (std::size_t n = 0; n < trace.times.size(); ++n) {
    os << trace.times[n];
    for (double v : trace.q[n]) os << ',' << v;
    os << '\n';
  }
}

void write_p_csv(std::ostream& os, const AgentTrace& trace) {
  os << kCsvVersionLine << "\nt,P\n" << std::setprecision(12);
  for (std::size_t n = 0; n < trace.times.size(); ++n) os << trace.times[n] << ',' << trace.p[n] << '\n';
}

// -- micro/macro consistency --------------------------------------------------

void DiracCheckSpec::validate() const {
  attrition.validate();
  if (!(horizon > 0.0)) throw ConfigError("dirac check horizon must be positive");
  if (samples < 2) throw ConfigError("dirac check needs at least 2 samples");
  if (!(dt > 0.0)) throw ConfigError("dirac check dt must be positive");
  sinkhorn.validate();
}

DiracReport dirac_consistency_check(const DiracCheckSpec& spec) {
  spec.validate();
  const Grid grid = spec.grid.make();
  const auto intervals = static_cast<std::size_t>(spec.samples - 1);
  const double sample_dt = spec.horizon / static_cast<double>(intervals);
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::ceil(sample_dt / spec.dt - 1e-9)));

  AgentScenario scn;
  scn.attackers = {spec.pair.attacker};
  scn.defenders = {spec.pair.defender};
  scn.hvu = spec.pair.attacker;
  scn.attacker_drift = constant_drift({spec.pair.attacker_velocity});
  scn.defender_control = constant_control({spec.pair.defender_velocity});
  scn.attrition = spec.attrition;
  scn.hvu_attrition = {0.0, 1.0};
  scn.horizon = spec.horizon;
  scn.dt = spec.horizon / static_cast<double>(intervals * stride);
  const AgentTrace agent = simulate_agents(scn);

  // A point mass as a density: the whole unit mass on the cell holding p.
  auto dirac = [&](Point p) {
    const auto [i, j] = grid.cell_of(p);
    std::vector<double> v(grid.size(), 0.0);
    v[grid.index(i, j)] = 1.0 / grid.cell_area();
    return DensityField(grid, std::move(v));
  };

  DiracReport rep;
  std::vector<double> d_pop;
  for (std::size_t s = 0; s <= intervals; ++s) {
    const std::size_t n = s * stride;
    const Point a = agent.attackers[n][0], d = agent.defenders[n][0];
    rep.times.push_back(agent.times[n]);
    rep.q_agent.push_back(agent.q[n][0]);
    rep.distance_sq.push_back(dist_sq(a, d));
    const double w2 = w2_squared(dirac(d), dirac(a), spec.sinkhorn);
    rep.w2_population.push_back(w2);
    d_pop.push_back(attrition_rate(spec.attrition, w2));
  }
  rep.q_population = survival_q(d_pop, rep.times);
  for (std::size_t s = 0; s < rep.times.size(); ++s) {
    rep.max_rel_deviation = std::max(rep.max_rel_deviation,
                                     std::abs(rep.q_population[s] - rep.q_agent[s]) / rep.q_agent[s]);
  }
  return rep;
}

void write_dirac_report_csv(std::ostream& os, const DiracReport& report) {
  os << kCsvVersionLine << "\nt,d2_agent,w2_population,Q_agent,Q_population,rel_dev\n"
     << std::setprecision(12);
  for (std::size_t s = 0; s < report.times.size(); ++s) {
    os << report.times[s] << ',' << report.distance_sq[s] << ',' << report.w2_population[s] << ','
       << report.q_agent[s] << ',' << report.q_population[s] << ','
       << std::abs(report.q_population[s] - report.q_agent[s]) / report.q_agent[s] << '\n';
  }
}

}  // namespace swarmfield
