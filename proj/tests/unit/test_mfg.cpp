#include <cmath>

#include "doctest.h"
#include "swarmfield/error.hpp"
#include "swarmfield/mfg.hpp"

using namespace swarmfield;

namespace {

double second_moment_about(const DensityField& d, Point c) {
  const Grid& g = d.grid();
  double s = 0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const Point p = g.center(i, j);
      s += ((p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y)) * d(i, j) * g.cell_area();
    }
  return s;
}

void check_flow_health(const DensityFlow& flow, const FlowStats& st) {
  for (const auto& d : flow) {
    CHECK(std::abs(integrate(d) - 1.0) <= 1e-8);
    CHECK(d.min() >= 0.0);
  }
  CHECK(st.clip_events == 0);
}

ScalarFlow constant_flow(const MfgConfig& cfg, double c) {
  return ScalarFlow(static_cast<std::size_t>(cfg.nt), ScalarField(cfg.grid.make(), c));
}

// w = |x|^2 / 2 at every sample.
ScalarFlow bowl(const MfgConfig& cfg) {
  const Grid g = cfg.grid.make();
  ScalarField w(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const Point p = g.center(i, j);
      w(i, j) = 0.5 * (p.x * p.x + p.y * p.y);
    }
  return ScalarFlow(static_cast<std::size_t>(cfg.nt), w);
}

}  // namespace

TEST_CASE("config invariants") {
  MfgConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.drift_factor() == doctest::Approx(5.0));
  c.drift_scaling = false;
  CHECK(c.drift_factor() == 1.0);
  const auto t = c.sample_times();
  CHECK(t.size() == 50);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 10.0);

  auto bad = [](auto edit) {
    MfgConfig m;
    edit(m);
    CHECK_THROWS_AS(m.validate(), ConfigError);
  };
  bad([](MfgConfig& m) { m.alpha = 1.5; });
  bad([](MfgConfig& m) { m.alpha = 0.0; });
  bad([](MfgConfig& m) { m.horizon = 0.0; });
  bad([](MfgConfig& m) { m.nt = 1; });
  bad([](MfgConfig& m) { m.epsilon = 0.0; });
  bad([](MfgConfig& m) { m.picard.damping = 0.0; });
  bad([](MfgConfig& m) { m.picard.damping = 1.5; });
  bad([](MfgConfig& m) { m.cfl = 0.5; });
  bad([](MfgConfig& m) { m.defenders.center = {7, 0}; });
  bad([](MfgConfig& m) { m.hvu.variance = -1; });
}

TEST_CASE("attacker flow without drift is a heat flow") {
  MfgConfig c;
  c.attacker_gain = 0.0;
  c.attackers = {{0, 0}, 0.35};
  FlowStats st;
  const DensityFlow mu = attacker_flow(c, &st);
  check_flow_health(mu, st);
  const auto t = c.sample_times();
  const double m0 = second_moment_about(mu.front(), {0, 0});
  for (std::size_t k = 1; k < mu.size(); ++k) {
    const double growth = second_moment_about(mu[k], {0, 0}) - m0;
    CHECK(std::abs(growth - 0.004 * t[k]) <= 0.05 * 0.004 * t[k]);
  }
}

TEST_CASE("attacker flow homes on its target") {
  MfgConfig c;
  FlowStats st;
  const DensityFlow coarse = attacker_flow(c, &st);
  check_flow_health(coarse, st);

  // Under the default gain the packet narrows below a 60x60 cell, so the
  // center-of-mass check runs where the grid resolves it.
  c.grid.nx = c.grid.ny = 240;
  FlowStats fine_st;
  const DensityFlow fine = attacker_flow(c, &fine_st);
  check_flow_health(fine, fine_st);
  const Moments mo = moments(fine.back());
  const double offset = std::exp(-4.0) * 5.0;  // e^{-kT} |(-4,4) - (1,1)| per axis
  CHECK(std::hypot(mo.mean.x - 1.0, mo.mean.y - 1.0) <= 0.12);
  CHECK(std::abs(mo.mean.x - (1.0 - offset)) <= 0.12);
  CHECK(std::abs(mo.mean.y - (1.0 + offset)) <= 0.12);
}

TEST_CASE("hjb with constant source") {
  MfgConfig c;
  c.grid.nx = c.grid.ny = 30;
  c.nt = 11;
  const ScalarFlow zero = hjb_backward(constant_flow(c, 0.0), c);
  for (const auto& w : zero) CHECK(w.max_abs() == 0.0);

  const ScalarFlow w = hjb_backward(constant_flow(c, 0.3), c);
  const auto t = c.sample_times();
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double exact = 0.3 * (c.horizon - t[k]);
    for (std::size_t i = 0; i < w[k].size(); ++i) CHECK(w[k][i] == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hjb_backward(ScalarFlow(3, ScalarField(c.grid.make())), c), InputError);
}

TEST_CASE("hjb manufactured solution converges under refinement") {
  // w = (T - t) A sin x cos y on the 2 pi torus.
  const double A = 0.5, T = 1.0;
  auto error_at = [&](int n, int nt) {
    MfgConfig c;
    c.grid = {0.0, 2 * M_PI, 0.0, 2 * M_PI, n, n};
    c.boundary = Boundary::periodic;
    c.horizon = T;
    c.nt = nt;
    c.epsilon = 0.05;
    c.alpha = 0.25;
    c.defenders.center = c.attackers.center = c.hvu.center = c.attacker_target = {M_PI, M_PI};
    const Grid g = c.grid.make();
    const auto times = c.sample_times();
    ScalarFlow f, exact;
    for (double t : times) {
      ScalarField fk(g), wk(g);
      const double s = T - t;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double x = g.x_center(i), y = g.y_center(j);
          const double w = s * A * std::sin(x) * std::cos(y);
          const double wx = s * A * std::cos(x) * std::cos(y), wy = -s * A * std::sin(x) * std::sin(y);
          wk(i, j) = w;
          fk(i, j) = A * std::sin(x) * std::cos(y) + 2 * c.epsilon * w + (wx * wx + wy * wy) / (4 * c.alpha);
        }
      f.push_back(fk);
      exact.push_back(wk);
    }
    const ScalarFlow w = hjb_backward(f, c);
    double err = 0;
    for (std::size_t k = 0; k < w.size(); ++k)
      for (std::size_t i = 0; i < w[k].size(); ++i) err = std::max(err, std::abs(w[k][i] - exact[k][i]));
    return err;
  };
  const double e1 = error_at(32, 9), e2 = error_at(64, 17);
  CAPTURE(e1);
  CAPTURE(e2);
  CHECK(e1 / e2 >= 3.0);
  CHECK(e2 <= 5e-3);
}

TEST_CASE("fp_forward with w = 0 obeys the maximum principle") {
  MfgConfig c;
  const DensityField m0 = gaussian_density(c.grid.make(), c.defenders.center, c.defenders.variance);
  FlowStats st;
  const DensityFlow m = fp_forward(constant_flow(c, 0.0), m0, c, &st);
  check_flow_health(m, st);
  for (std::size_t k = 1; k < m.size(); ++k) {
    CHECK(m[k].max() <= m[k - 1].max());
    CHECK(m[k].min() >= m[k - 1].min());
  }
}

TEST_CASE("fp_forward under a quadratic potential contracts") {
  MfgConfig c;
  c.horizon = 1.0;
  c.nt = 21;
  const DensityField m0 = gaussian_density(c.grid.make(), {2, -1}, 0.85);
  FlowStats st;
  const DensityFlow m = fp_forward(bowl(c), m0, c, &st);
  check_flow_health(m, st);
  double prev = second_moment_about(m.front(), {0, 0});
  for (std::size_t k = 1; k < m.size(); ++k) {
    const double s = second_moment_about(m[k], {0, 0});
    CHECK(s < prev);
    prev = s;
  }
  // Mean decays as exp(-t / (2 alpha)).
  CHECK(moments(m[4]).mean.x == doctest::Approx(2.0 * std::exp(-5.0 * 0.2)).epsilon(0.05));
}

TEST_CASE("coupling vanishes without the defender weapon") {
  MfgConfig c;
  c.attacker_attrition.lambda = 0.0;
  const Grid g = c.grid.make();
  const std::vector<double> t{0.0, 1.0}, r{3.0, 2.0}, h{4.0, 1.0};
  const SurvivalTrace tr = survival_trace(t, r, h, c);
  ScalarField phi(g, 1.0);
  phi[7] = -4.0;
  CHECK(coupling_from_potential(1, phi, c, tr).max_abs() == 0.0);
}

TEST_CASE("coupling is a positive multiple of the potential") {
  MfgConfig c;
  const Grid g = c.grid.make();
  const std::vector<double> t{0.0, 1.0}, r{3.0, 2.0}, h{4.0, 1.0};
  const SurvivalTrace tr = survival_trace(t, r, h, c);
  CHECK(tr.q[0] == 1.0);
  CHECK(tr.p[0] == 1.0);
  const double scale = (1 - c.alpha) * attrition_rate(c.hvu_attrition, 1.0) * tr.q[1] *
                       -attrition_rate_derivative(c.attacker_attrition, 2.0);
  ScalarField phi(g);
  for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = std::sin(0.01 * static_cast<double>(k));
  const ScalarField f = coupling_from_potential(1, phi, c, tr);
  for (std::size_t k = 0; k < phi.size(); ++k) CHECK(f[k] == doctest::Approx(scale * phi[k]).epsilon(1e-14));
  CHECK_THROWS_AS(coupling_from_potential(2, phi, c, tr), InputError);
}

TEST_CASE("coupling field at coincidence and its sign") {
  MfgConfig c;
  const Grid g = c.grid.make();
  const std::vector<double> t{0.0}, r{0.5}, h{1.0};
  const SurvivalTrace tr = survival_trace(t, r, h, c);
  const DensityField nu = gaussian_density(g, c.hvu.center, c.hvu.variance);

  // Defenders west of the attackers: F is smallest on the attackers' side.
  const DensityFlow m{gaussian_density(g, {-2, 0}, 0.85)};
  const DensityFlow mu{gaussian_density(g, {2, 0}, 0.85)};
  const ScalarField f = coupling_field(0, m, mu, nu, c, tr);

  const DensityFlow same{gaussian_density(g, {0, 0}, 0.85)};
  CHECK(coupling_field(0, same, same, nu, c, tr).max_abs() <= 1e-3 * f.max_abs());

  std::size_t arg = 0;
  for (std::size_t k = 1; k < f.size(); ++k)
    if (f[k] < f[arg]) arg = k;
  CHECK(g.x_center(static_cast<int>(arg % g.nx())) > 0.0);
}

TEST_CASE("decoupled fixed point is the heat flow") {
  MfgConfig c;
  c.grid.nx = c.grid.ny = 40;
  c.nt = 21;
  c.attacker_attrition.lambda = 0.0;
  c.hvu_attrition.lambda = 0.0;
  const MfgSolution s = picard_solve(c);
  CHECK(s.converged);
  CHECK(s.outer_iterations == 1);
  for (const auto& w : s.w_flow) CHECK(w.max_abs() <= 1e-12);
  const DensityField m0 = gaussian_density(c.grid.make(), c.defenders.center, c.defenders.variance);
  const DensityFlow heat = fp_forward(ScalarFlow(21, ScalarField(c.grid.make())), m0, c);
  for (std::size_t k = 0; k < heat.size(); ++k) {
    for (std::size_t i = 0; i < heat[k].size(); ++i) CHECK(std::abs(s.m_flow[k][i] - heat[k][i]) <= 1e-10);
  }
  CHECK(s.trace.p.back() == 1.0);
  CHECK(s.objective() == 0.0);
  CHECK(s.clip_events == 0);
  CHECK(s.max_mass_error <= 1e-8);

  const BoundsReport b = verify_bounds(s, c);
  CHECK(b.k == 0.0);
  CHECK(b.ok());
}

TEST_CASE("mirror-symmetric scenario stays symmetric") {
  MfgConfig c;
  c.grid.nx = c.grid.ny = 30;
  c.nt = 16;
  c.horizon = 5.0;
  c.defenders = {{-3, 0}, 0.85};
  c.attackers = {{3, 0}, 0.85};
  c.hvu = {{-1, 0}, 0.1};
  c.attacker_target = {-1, 0};
  c.picard.max_outer = 4;
  const MfgSolution s = picard_solve(c);
  const Grid g = c.grid.make();
  double asym = 0;
  for (const auto& m : s.m_flow)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) asym = std::max(asym, std::abs(m(i, j) - m(i, g.ny() - 1 - j)));
  CHECK(asym <= 1e-6);
  CHECK(s.residuals.size() == static_cast<std::size_t>(s.outer_iterations));
  for (const auto& m : s.m_flow) CHECK(std::abs(integrate(m) - 1.0) <= 1e-8);
}

TEST_CASE("envelope detector flags a halved K") {
  // w = -A (cos(pi x / 5) + cos(pi y / 5)) has zero normal derivative on the
  // walls and concentrates mass at the origin at rate close to K.
  MfgConfig c;
  c.horizon = 0.5;
  c.nt = 21;
  const double A = 1.5, kk = M_PI / 5;
  const Grid g = c.grid.make();
  ScalarField w0(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) w0(i, j) = -A * (std::cos(kk * g.x_center(i)) + std::cos(kk * g.y_center(j)));
  const ScalarFlow w(static_cast<std::size_t>(c.nt), w0);
  const DensityField m0 = gaussian_density(g, {0, 0}, 0.85);
  FlowStats st;
  const DensityFlow m = fp_forward(w, m0, c, &st);
  check_flow_health(m, st);
  const auto t = c.sample_times();

  const BoundsReport full = verify_bounds(t, m, w, c);
  CHECK(full.k_value == doctest::Approx(2 * A * kk * kk).epsilon(0.01));
  CHECK(full.k == doctest::Approx(5.0 * full.k_value).epsilon(1e-12));
  CHECK(full.ok());
  CHECK(full.samples.size() == t.size());

  BoundsOptions shrunk;
  shrunk.k_override = full.k / 2;
  const BoundsReport half = verify_bounds(t, m, w, c, shrunk);
  CHECK(half.violation_count > 0);
  CHECK(half.max_violation_ratio > 1.0);
}
