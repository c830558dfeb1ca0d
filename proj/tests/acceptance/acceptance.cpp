// End-to-end checks; one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "swarmfield/agents.hpp"
#include "swarmfield/mfg.hpp"
#include "swarmfield/ot.hpp"
#include "swarmfield/scenario.hpp"

using namespace swarmfield;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Health {
  double mass_err = 0.0;
  double min_density = 0.0;
  long clips = 0;

  void add(const DensityFlow& flow) {
    for (const auto& d : flow) {
      mass_err = std::max(mass_err, std::abs(integrate(d) - 1.0));
      min_density = std::min(min_density, d.min());
    }
  }
  bool ok() const { return mass_err <= 1e-8 && min_density >= 0.0 && clips == 0; }
};

Health health;

MfgSolution solve(const std::string& label, const MfgConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  MfgSolution s = picard_solve(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("  run %-22s P(T)=%.6f Q(T)=%.3e iterations=%d converged=%d (%.0f s)\n", label.c_str(),
              s.trace.p.back(), s.trace.q.back(), s.outer_iterations, s.converged ? 1 : 0, secs);
  std::fflush(stdout);
  health.add(s.m_flow);
  health.add(s.mu_flow);
  health.clips += s.clip_events;
  return s;
}

double second_moment(const DensityField& d, Point c) {
  const Grid& g = d.grid();
  double s = 0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const Point p = g.center(i, j);
      s += ((p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y)) * d(i, j) * g.cell_area();
    }
  return s;
}

void bures() {
  const Grid g(-5, 5, -5, 5, 60, 60);
  struct Pair {
    Point a;
    double va;
    Point b;
    double vb;
  };
  const Pair pairs[] = {{{0, 0}, 0.85, {2, 2}, 0.85}, {{-1, 0}, 0.5, {1, 0}, 1.0},  {{-2, -2}, 1.5, {1, 2}, 0.85},
                        {{0, 0}, 0.35, {0, 1}, 1.4},  {{-3, 1}, 1.0, {2, -1}, 2.0}, {{1, 1}, 0.2, {-1, -2}, 0.6}};
  double worst = 0;
  for (const Pair& p : pairs) {
    const double est = w2_squared(gaussian_density(g, p.a, p.va), gaussian_density(g, p.b, p.vb), {});
    const double exact = gaussian_w2_closed_form(p.a, p.va, p.b, p.vb);
    worst = std::max(worst, std::abs(est - exact) / exact);
  }
  report(1, worst <= 0.05, "Sinkhorn W2^2 vs Bures closed form, 6 Gaussian pairs",
         fmt("max relative error %.4f, limit 0.05", worst));
}

void sweeps() {
  const DistanceTable var = distance_sweep(default_sweep(SweepMode::variance));
  const auto x = var.column("sweep_value"), w = var.column("w2");
  const auto best = static_cast<std::size_t>(std::min_element(w.begin(), w.end()) - w.begin());
  bool unimodal = best > 0 && best + 1 < w.size();
  for (std::size_t k = 1; k < w.size(); ++k) unimodal &= k <= best ? w[k] < w[k - 1] : w[k] > w[k - 1];
  const bool near = std::abs(x[best] - 1.5) <= 0.3;

  const DistanceTable tr = distance_sweep(default_sweep(SweepMode::translation));
  const auto tw = tr.column("w2");
  bool monotone = true;
  for (std::size_t k = 1; k < tw.size(); ++k) monotone &= tw[k] < tw[k - 1];
  report(2, unimodal && near && monotone, "distance sweeps: variance minimum near 1.5, translation monotone",
         fmt("argmin at s2=%.3f, unique interior minimum %s, translation decreasing %s", x[best],
             unimodal ? "yes" : "no", monotone ? "yes" : "no"));
}

void survival() {
  const int nt = 50;
  const double T = 10.0;
  std::vector<double> t(nt), rate(nt, 0.3), ones(nt, 1.0), hrate(nt, 0.2);
  for (int k = 0; k < nt; ++k) t[k] = T * k / (nt - 1);
  const auto q = survival_q(rate, t);
  const auto p = survival_p(hrate, ones, t);
  double err = 0;
  for (int k = 0; k < nt; ++k) {
    err = std::max(err, std::abs(q[k] - std::exp(-0.3 * t[k])) / std::exp(-0.3 * t[k]));
    err = std::max(err, std::abs(p[k] - std::exp(-0.2 * t[k])) / std::exp(-0.2 * t[k]));
  }
  std::vector<double> t2(nt), qe(nt);
  for (int k = 0; k < nt; ++k) t2[k] = 2.0 * k / (nt - 1), qe[k] = std::exp(-t2[k]);
  const double p2 = survival_p(ones, qe, t2).back();
  const double exact = std::exp(-(1 - std::exp(-2.0)));
  const double err2 = std::abs(p2 - exact) / exact;
  report(3, err <= 1e-3 && err2 <= 1e-3, "survival closed forms at nt = 50",
         fmt("constant-rate max rel error %.2e, two-stage P(2) rel error %.2e", err, err2));
}

void heat() {
  MfgConfig c;
  c.attacker_gain = 0.0;
  c.attackers = {{0, 0}, 0.35};
  FlowStats st;
  const DensityFlow mu = attacker_flow(c, &st);
  const auto t = c.sample_times();
  const double m0 = second_moment(mu.front(), {0, 0});
  double worst = 0;
  for (std::size_t k = 1; k < mu.size(); ++k) {
    const double g = second_moment(mu[k], {0, 0}) - m0;
    worst = std::max(worst, std::abs(g - 0.004 * t[k]) / (0.004 * t[k]));
  }
  report(4, worst <= 0.05, "zero-drift second moment grows by 2 d eps t",
         fmt("max relative deviation %.4f over T = 10, limit 0.05", worst));
}

double manufactured_error(int n, int nt) {
  const double A = 0.5, T = 1.0;
  MfgConfig c;
  c.grid = {0.0, 2 * M_PI, 0.0, 2 * M_PI, n, n};
  c.boundary = Boundary::periodic;
  c.horizon = T;
  c.nt = nt;
  c.epsilon = 0.05;
  c.alpha = 0.25;
  c.defenders.center = c.attackers.center = c.hvu.center = c.attacker_target = {M_PI, M_PI};
  const Grid g = c.grid.make();
  ScalarFlow f, exact;
  for (double t : c.sample_times()) {
    ScalarField fk(g), wk(g);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = g.x_center(i), y = g.y_center(j), s = T - t;
        const double wx = s * A * std::cos(x) * std::cos(y), wy = -s * A * std::sin(x) * std::sin(y);
        wk(i, j) = s * A * std::sin(x) * std::cos(y);
        fk(i, j) = A * std::sin(x) * std::cos(y) + 2 * c.epsilon * wk(i, j) + (wx * wx + wy * wy) / (4 * c.alpha);
      }
    f.push_back(fk);
    exact.push_back(wk);
  }
  const ScalarFlow w = hjb_backward(f, c);
  double err = 0;
  for (std::size_t k = 0; k < w.size(); ++k)
    for (std::size_t i = 0; i < w[k].size(); ++i) err = std::max(err, std::abs(w[k][i] - exact[k][i]));
  return err;
}

void manufactured() {
  const double e1 = manufactured_error(32, 9), e2 = manufactured_error(64, 17);
  report(5, e1 / e2 >= 3.0, "HJB manufactured solution under dx, dt halving",
         fmt("L-inf error %.3e -> %.3e, ratio %.2f, limit 3", e1, e2, e1 / e2));
}

void decoupled() {
  MfgConfig c;
  c.attacker_attrition.lambda = 0.0;
  c.hvu_attrition.lambda = 0.0;
  const MfgSolution s = solve("decoupled", c);
  double wmax = 0;
  for (const auto& w : s.w_flow) wmax = std::max(wmax, w.max_abs());
  const DensityField m0 = gaussian_density(c.grid.make(), c.defenders.center, c.defenders.variance);
  FlowStats st;
  const DensityFlow heat = fp_forward(ScalarFlow(c.nt, ScalarField(c.grid.make())), m0, c, &st);
  health.add(heat);
  health.clips += st.clip_events;
  double diff = 0;
  for (std::size_t k = 0; k < heat.size(); ++k)
    for (std::size_t i = 0; i < heat[k].size(); ++i) diff = std::max(diff, std::abs(s.m_flow[k][i] - heat[k][i]));
  const bool ok = s.converged && s.outer_iterations == 1 && wmax <= 1e-12 && diff <= 1e-10;
  report(6, ok, "decoupled fixed point",
         fmt("iterations %d, max|w| %.1e, max|m - heat| %.1e", s.outer_iterations, wmax, diff));
}

void fig2() {
  const char* names[] = {"fig2_panel1", "fig2_panel2", "fig2_panel3"};
  double p[3], q[3];
  bool conv = true;
  for (int i = 0; i < 3; ++i) {
    const MfgSolution s = solve(names[i], preset(names[i]).mfg);
    p[i] = s.trace.p.back();
    q[i] = s.trace.q.back();
    conv &= s.converged;
  }
  const bool p_ok = p[0] - p[1] >= 0.05 && p[1] - p[2] >= 0.05;
  const bool q_ok = q[0] < q[1] && q[1] < q[2];
  report(7, conv && p_ok && q_ok, "regime ordering of P(T) and Q(T) across the three engagement panels",
         fmt("P(T) %.4f / %.4f / %.4f, margins %.4f and %.4f (need >= 0.05): %s; Q(T) %.3e / %.3e / %.3e "
             "increasing: %s; all converged %s",
             p[0], p[1], p[2], p[0] - p[1], p[1] - p[2], p_ok ? "ok" : "no", q[0], q[1], q[2],
             q_ok ? "yes" : "no", conv ? "yes" : "no"));
}

void fig3() {
  const char* names[] = {"fig3_var0p35", "fig3_var1p4", "fig3_var1p8"};
  double p[3];
  bool conv = true;
  MfgSolution mid;
  for (int i = 0; i < 3; ++i) {
    MfgSolution s = solve(names[i], preset(names[i]).mfg);
    p[i] = s.trace.p.back();
    conv &= s.converged;
    if (i == 1) mid = std::move(s);
  }
  const bool ok = conv && p[1] > p[0] && p[1] > p[2] && p[2] <= 0.15;
  report(8, ok, "dispersion ordering: moderate spread protects the HVU best",
         fmt("P(T) at 0.35 / 1.4 / 1.8 = %.4e / %.4e / %.4e; 1.4 highest: %s; P(1.8) <= 0.15: %s; "
             "all converged %s",
             p[0], p[1], p[2], p[1] > p[0] && p[1] > p[2] ? "yes" : "no", p[2] <= 0.15 ? "yes" : "no",
             conv ? "yes" : "no"));

  double lo = 1e300, hi = 0;
  for (const auto& m : mid.m_flow) lo = std::min(lo, m.min()), hi = std::max(hi, m.max());
  std::printf("INFO criterion 12: fig3_var1p4 density min %.3e (reported 4.68e-06, ratio 10^%.1f), "
              "max %.3e (reported 8.96e-04, ratio 10^%.1f)\n",
              lo, std::log10(std::max(lo, 1e-300) / 4.68e-6), hi, std::log10(hi / 8.96e-4));
}

// Fixed potential that concentrates mass at the origin at a rate close to K,
// so a halved K must be flagged.
bool shrunk_envelope_detected(std::string& detail) {
  MfgConfig c;
  c.boundary = Boundary::periodic;
  c.horizon = 0.5;
  c.nt = 21;
  const double A = 1.5, kk = M_PI / 5;
  const Grid g = c.grid.make();
  ScalarField w0(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) w0(i, j) = -A * (std::cos(kk * g.x_center(i)) + std::cos(kk * g.y_center(j)));
  const ScalarFlow w(static_cast<std::size_t>(c.nt), w0);
  FlowStats st;
  const DensityFlow m = fp_forward(w, gaussian_density(g, {0, 0}, 0.85), c, &st);
  const auto t = c.sample_times();
  const BoundsReport full = verify_bounds(t, m, w, c);
  BoundsOptions shrunk;
  shrunk.k_override = full.k / 2;
  const BoundsReport half = verify_bounds(t, m, w, c, shrunk);
  detail += fmt("detector: full-K violations %ld, halved-K violations %ld (ratio %.3f)", full.violation_count,
                half.violation_count, half.max_violation_ratio);
  return full.ok() && half.violation_count > 0;
}

void envelope() {
  long violations = 0;
  int runs = 0;
  std::string detail;
  for (const char* name : {"fig2_panel1", "fig2_panel2", "fig2_panel3"}) {
    MfgConfig c = preset(name).mfg;
    c.boundary = Boundary::periodic;
    const MfgSolution s = solve(std::string(name) + " periodic", c);
    const BoundsReport b = verify_bounds(s, c);
    if (!s.converged) {
      // Not gated; logged with its envelope status.
      detail += fmt("%s not converged (residual %.2e, violations %ld); ", name,
                    s.residuals.empty() ? 0.0 : s.residuals.back(), b.violation_count);
      continue;
    }
    ++runs;
    violations += b.violation_count;
    detail += fmt("%s K=%.3g violations %ld; ", name, b.k, b.violation_count);
  }
  detail += fmt("%d of 3 converged, total violations %ld; ", runs, violations);
  const bool detected = shrunk_envelope_detected(detail);
  report(9, runs > 0 && violations == 0 && detected,
         "periodic runs stay inside the two-sided envelope; a shrunk envelope is detected", detail);
}

void dirac() {
  double worst = 0;
  std::string detail;
  for (const char* name : {"oracle_stationary", "oracle_coincident", "oracle_diverging"}) {
    const DiracReport r = dirac_consistency_check(preset(name).dirac_spec());
    worst = std::max(worst, r.max_rel_deviation);
    detail += fmt("%s %.2e; ", name, r.max_rel_deviation);
  }
  report(10, worst <= 0.03, "agent-wise vs population-wise Q for single pairs", detail + "limit 0.03");
}

}  // namespace

int main() {
  bures();
  sweeps();
  survival();
  heat();
  manufactured();
  decoupled();
  fig2();
  fig3();
  envelope();
  dirac();
  report(11, health.ok(), "mass, positivity and clipping over every flow of criteria 6-9",
         fmt("max mass error %.2e, min density %.2e, clip events %ld", health.mass_err, health.min_density,
             health.clips));
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
