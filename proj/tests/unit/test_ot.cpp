#include <cmath>
#include <sstream>

#include "doctest.h"
#include "swarmfield/error.hpp"
#include "swarmfield/ot.hpp"

using namespace swarmfield;

namespace {

Grid box(int n) { return make_grid({-5, 5, -5, 5}, n, n); }

DensityField dirac(const Grid& g, Point p) {
  std::vector<double> v(g.size(), 0.0);
  const auto [i, j] = g.cell_of(p);
  v[g.index(i, j)] = 1.0 / g.cell_area();
  return DensityField(g, std::move(v));
}

SinkhornParams tight(double eps) {
  SinkhornParams p;
  p.eps_ot = eps;
  p.tol = 1e-10;
  p.max_iter = 20000;
  return p;
}

double pairing(const ScalarField& g, const DensityField& a, const DensityField& b) {
  double s = 0;
  for (std::size_t k = 0; k < g.size(); ++k) s += g[k] * (a[k] - b[k]) * g.grid().cell_area();
  return s;
}

}  // namespace

TEST_CASE("sinkhorn between single cells recovers the squared distance") {
  const Grid g = box(60);
  const auto a = dirac(g, {0.01, 0.01}), b = dirac(g, {2.01, 0.01});
  const SinkhornResult r = sinkhorn(a, b, SinkhornParams{});
  CHECK(r.converged);
  CHECK(std::abs(r.cost - 4.0) <= 0.1);
  CHECK(w2_squared(a, b, SinkhornParams{}) == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("periodic cost wraps around the box") {
  const Grid g = box(40);
  const auto a = dirac(g, {-4.9, 0.1}), b = dirac(g, {4.9, 0.1});
  SinkhornParams p;
  CHECK(w2_squared(a, b, p) == doctest::Approx(9.75 * 9.75).epsilon(0.02));
  p.periodic = true;
  CHECK(w2_squared(a, b, p) == doctest::Approx(0.25 * 0.25).epsilon(0.5));

  const auto c = gaussian_density(g, {-4, 3}, 0.85), d = gaussian_density(g, {3.5, -3}, 0.6);
  SinkhornParams dense = tight(0.2), sep = dense;
  dense.kernel = SinkhornKernel::dense;
  dense.periodic = sep.periodic = true;
  CHECK(w2_squared(c, d, sep) == doctest::Approx(w2_squared(c, d, dense)).epsilon(1e-8));
  // Torus separation (2.5, 4) against the box separation (7.5, 6).
  CHECK(w2_squared(c, d, sep) < 0.5 * w2_squared(c, d, tight(0.2)));
}

TEST_CASE("self transport carries a nonzero entropic bias") {
  const auto rho = gaussian_density(box(60), {0, 0}, 0.85);
  const SinkhornResult s = sinkhorn_self(rho, SinkhornParams{});
  CHECK(s.converged);
  CHECK(std::abs(s.cost) > 1e-3);
  const SinkhornResult c = sinkhorn(rho, rho, SinkhornParams{});
  CHECK(c.cost == doctest::Approx(s.cost).epsilon(1e-5));
  CHECK(w2_squared(rho, rho, SinkhornParams{}) <= 1e-6);
}

TEST_CASE("debiased divergence matches a dense numpy reference") {
  // Values from an independent scipy log-sum-exp Sinkhorn on a 16x16 grid.
  const Grid g = box(16);
  const SinkhornParams p = tight(0.5);
  {
    const auto mu = gaussian_density(g, {-1, 0.5}, 0.85), m = gaussian_density(g, {1.5, -1}, 1.5);
    const auto d = sinkhorn_divergence(mu, m, p, sinkhorn_self(mu, p));
    CHECK(d.converged);
    CHECK(d.value == doctest::Approx(8.629691535157606).epsilon(1e-7));
  }
  {
    const auto mu = gaussian_density(g, {0, 0}, 1.0), m = gaussian_density(g, {2, 0}, 1.0);
    const auto d = sinkhorn_divergence(mu, m, p, sinkhorn_self(mu, p));
    CHECK(d.value == doctest::Approx(3.9847847731799284).epsilon(1e-7));
  }
}

TEST_CASE("separable and dense kernels agree") {
  const Grid g = box(14);
  const auto a = gaussian_density(g, {-1, 1}, 0.7), b = gaussian_density(g, {2, -0.5}, 1.3);
  SinkhornParams ps = tight(0.2), pd = ps;
  pd.kernel = SinkhornKernel::dense;
  const auto rs = sinkhorn(a, b, ps), rd = sinkhorn(a, b, pd);
  CHECK(rs.cost == doctest::Approx(rd.cost).epsilon(1e-8));
  CHECK(w2_squared(a, b, ps) == doctest::Approx(w2_squared(a, b, pd)).epsilon(1e-8));
}

TEST_CASE("warm start reaches the same fixed point") {
  const Grid g = box(40);
  const auto a = gaussian_density(g, {-1, 1}, 0.85), b = gaussian_density(g, {1, 0}, 0.85);
  const auto b2 = gaussian_density(g, {1.1, 0}, 0.85);
  const SinkhornParams p = tight(0.1);
  const auto cold = sinkhorn(a, b2, p);
  const auto prev = sinkhorn(a, b, p);
  const auto warm = sinkhorn(a, b2, p, &prev);
  CHECK(warm.converged);
  CHECK(warm.cost == doctest::Approx(cold.cost).epsilon(1e-8));
  // Restarting a solved problem only re-verifies the marginal.
  CHECK(sinkhorn(a, b, p, &prev).iterations == 1);
  CHECK(prev.iterations > 1);
}

TEST_CASE("w2_squared against the Bures formula") {
  const Grid g = box(60);
  CHECK(w2_squared(gaussian_density(g, {0, 0}, 0.85), gaussian_density(g, {2, 2}, 0.85), {}) ==
        doctest::Approx(8.0).epsilon(0.05));
  CHECK(gaussian_w2_closed_form({0, 0}, 1, {0, 0}, 1) == 0.0);
  CHECK(gaussian_w2_closed_form({0, 0}, 0.85, {2, 2}, 0.85) == 8.0);
  CHECK(gaussian_w2_closed_form({0, 0}, 0.5, {1, 0}, 2.0) ==
        doctest::Approx(1.0 + 2.0 * (std::sqrt(0.5) - std::sqrt(2.0)) * (std::sqrt(0.5) - std::sqrt(2.0))));
  CHECK_THROWS_AS(gaussian_w2_closed_form({0, 0}, 0.0, {1, 0}, 1.0), DomainError);
}

TEST_CASE("w2_squared is symmetric") {
  const Grid g = box(60);
  const auto a = gaussian_density(g, {-2, 1}, 0.6), b = gaussian_density(g, {1.5, -0.5}, 1.2);
  const SinkhornParams p = tight(0.1);
  CHECK(std::abs(w2_squared(a, b, p) - w2_squared(b, a, p)) <= 1e-8);
}

TEST_CASE("first variation vanishes at coincidence") {
  const auto m = gaussian_density(box(60), {0.5, -1}, 0.85);
  const ScalarField phi = first_variation_w2(m, m, tight(0.1));
  CHECK(phi.max_abs() <= 1e-6);
}

TEST_CASE("first variation predicts the directional derivative") {
  const Grid g = box(60);
  const SinkhornParams p = tight(0.1);
  struct Case {
    Point mu_c;
    double mu_v;
    Point m_c;
    double m_v;
    Point rho_c;
    double rho_v;
  };
  const Case cases[] = {
      {{2, 0}, 0.85, {-1, 0}, 0.85, {0, 0}, 0.85},   {{0, 0}, 0.85, {2, 2}, 0.85, {1, 1}, 1.0},
      {{-3, 1}, 0.5, {1, -1}, 1.2, {-1, 0}, 0.6},    {{1, 1}, 0.1, {-2, 3}, 0.85, {-1, 2}, 1.5},
      {{0, 0}, 2.0, {0.5, 0}, 0.5, {0, -0.5}, 0.85}, {{-4, 4}, 0.85, {-3, -3}, 0.85, {-4, 0}, 1.0},
  };
  const double e = 1e-2;
  for (const Case& c : cases) {
    const auto mu = gaussian_density(g, c.mu_c, c.mu_v);
    const auto m = gaussian_density(g, c.m_c, c.m_v);
    const auto rho = gaussian_density(g, c.rho_c, c.rho_v);
    std::vector<double> mix(g.size());
    for (std::size_t k = 0; k < mix.size(); ++k) mix[k] = (1 - e) * m[k] + e * rho[k];
    const DensityField me(g, mix);

    const double fd = w2_squared(mu, me, p) - w2_squared(mu, m, p);
    const double pred = e * pairing(first_variation_w2(mu, m, p), rho, m);
    CAPTURE(fd);
    CAPTURE(pred);
    CHECK(std::abs(fd - pred) <= 0.1 * std::abs(pred));
  }
}

TEST_CASE("first variation slopes down toward the target") {
  const Grid g = box(60);
  const auto mu = gaussian_density(g, {2, 0}, 0.85), m = gaussian_density(g, {-1, 0}, 0.85);
  const ScalarField phi = first_variation_w2(mu, m, SinkhornParams{});
  // Along the row through y = 0 the potential decreases from m's support toward mu.
  const auto [i0, j0] = g.cell_of({-1.5, 0.01});
  const auto [i1, j1] = g.cell_of({1.5, 0.01});
  CHECK(phi(i1, j1) < phi(i0, j0));
  for (int i = i0; i < i1; ++i) CHECK(phi(i + 1, j0) < phi(i, j0));
  // Zero mean against m.
  double mean = 0;
  for (std::size_t k = 0; k < phi.size(); ++k) mean += phi[k] * m[k] * g.cell_area();
  CHECK(std::abs(mean) <= 1e-9);
}

TEST_CASE("kl_divergence against the Gaussian closed form") {
  const Grid g = box(60);
  const auto a = gaussian_density(g, {0, 0}, 1.0);
  CHECK(kl_divergence(a, a) == doctest::Approx(0.0).scale(1.0));
  for (double v : {0.85, 1.0, 1.5}) {
    const auto p = gaussian_density(g, {-0.5, 0}, v), q = gaussian_density(g, {0.5, 0.5}, v);
    const double exact = 1.25 / (2 * v);
    CHECK(std::abs(kl_divergence(p, q) - exact) <= 0.05 * exact);
  }
}

TEST_CASE("translation sweep decreases to zero") {
  SweepSpec s = default_sweep(SweepMode::translation);
  s.samples = 11;
  const DistanceTable t = distance_sweep(s);
  CHECK(t.rows.size() == 11);
  CHECK(t.columns[0] == "sweep_value");
  const auto w2 = t.column("w2"), kl = t.column("kl");
  for (std::size_t k = 1; k < w2.size(); ++k) {
    CHECK(w2[k] < w2[k - 1]);
    CHECK(kl[k] < kl[k - 1]);
  }
  // The table holds W2 itself, not its square.
  CHECK(w2.back() <= 1e-3);
  CHECK(kl.back() <= 1e-9);
  CHECK(w2.front() == doctest::Approx(std::sqrt(8.0)).epsilon(0.025));
}

TEST_CASE("variance sweep has an interior minimum near 1.5") {
  SweepSpec s = default_sweep(SweepMode::variance);
  s.samples = 21;
  const NamedDistance extra[] = {{"bures", [](const DensityField&, const DensityField&) { return 0.0; }}};
  const DistanceTable t = distance_sweep(s, extra);
  CHECK(t.columns.size() == 4);
  const auto x = t.column("sweep_value"), w2 = t.column("w2");
  CHECK(x.front() == doctest::Approx(0.1));
  CHECK(x.back() == doctest::Approx(10.0));
  std::size_t best = 0;
  for (std::size_t k = 1; k < w2.size(); ++k)
    if (w2[k] < w2[best]) best = k;
  CHECK(best > 0);
  CHECK(best + 1 < w2.size());
  CHECK(std::abs(x[best] - 1.5) <= 0.5);
  CHECK(w2.front() > w2[best]);
  CHECK(w2.back() > w2[best]);

  std::ostringstream os;
  write_table_csv(os, t);
  CHECK(os.str().find("\nsweep_value,w2,kl,bures\n") != std::string::npos);

  SweepSpec bad = s;
  bad.samples = 1;
  CHECK_THROWS_AS(distance_sweep(bad), ConfigError);
}
