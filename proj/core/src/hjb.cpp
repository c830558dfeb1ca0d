#include <algorithm>
#include <cmath>
#include <string>

#include "swarmfield/error.hpp"
#include "swarmfield/mfg.hpp"
#include "transport.hpp"

namespace swarmfield {

namespace {

// Smaller-magnitude choice of two second differences (ENO2 stencil pick).
inline double smaller(double a, double b) noexcept { return std::abs(a) <= std::abs(b) ? a : b; }

// Godunov flux of p^2 for a left-biased slope a and a right-biased slope b.
inline double godunov_sq(double a, double b) noexcept {
  const double l = std::max(a, 0.0), r = std::min(b, 0.0);
  return std::max(l * l, r * r);
}

constexpr long kMaxSubsteps = 5'000'000;
constexpr double kBlowUp = 1e150;

class Hamiltonian {
 public:
  Hamiltonian(const Grid& g, Boundary bc, double alpha)
      : g_(g), bc_(bc), alpha_(alpha), d2x_(g.size()), d2y_(g.size()) {}

  // out = |Dw|^2 / (4 alpha) by ENO2 one-sided slopes and the Godunov flux.
  // Returns the Courant rate max(|H_px| / dx + |H_py| / dy).
  double evaluate(std::span<const double> w, std::span<double> out) {
    const int nx = g_.nx(), ny = g_.ny();
    const double dx = g_.dx(), dy = g_.dy();
    auto at = [&](int i, int j) { return w[g_.index(wrap(i, nx), wrap(j, ny))]; };
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double c = at(i, j);
        d2x_[g_.index(i, j)] = (at(i + 1, j) - 2.0 * c + at(i - 1, j)) / (dx * dx);
        d2y_[g_.index(i, j)] = (at(i, j + 1) - 2.0 * c + at(i, j - 1)) / (dy * dy);
      }
    }
    auto d2x = [&](int i, int j) { return d2x_[g_.index(wrap(i, nx), j)]; };
    auto d2y = [&](int i, int j) { return d2y_[g_.index(i, wrap(j, ny))]; };

    const double inv4a = 1.0 / (4.0 * alpha_), inv2a = 1.0 / (2.0 * alpha_);
    double rate = 0.0;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double c = at(i, j);
        const double pxm = (c - at(i - 1, j)) / dx + 0.5 * dx * smaller(d2x(i - 1, j), d2x(i, j));
        const double pxp = (at(i + 1, j) - c) / dx - 0.5 * dx * smaller(d2x(i, j), d2x(i + 1, j));
        const double pym = (c - at(i, j - 1)) / dy + 0.5 * dy * smaller(d2y(i, j - 1), d2y(i, j));
        const double pyp = (at(i, j + 1) - c) / dy - 0.5 * dy * smaller(d2y(i, j), d2y(i, j + 1));
        out[g_.index(i, j)] = (godunov_sq(pxm, pxp) + godunov_sq(pym, pyp)) * inv4a;
        const double sx = std::max(std::abs(pxm), std::abs(pxp)) * inv2a;
        const double sy = std::max(std::abs(pym), std::abs(pyp)) * inv2a;
        rate = std::max(rate, sx / dx + sy / dy);
      }
    }
    return rate;
  }

 private:
  int wrap(int k, int n) const noexcept { return detail::wrap_index(k, n, bc_); }

  Grid g_;
  Boundary bc_;
  double alpha_;
  std::vector<double> d2x_, d2y_;
};

void check_field(std::span<const double> w, std::size_t k) {
  for (double v : w) {
    if (!std::isfinite(v) || std::abs(v) > kBlowUp) {
      throw SolverDiagnostic("hjb_backward blew up at sample " + std::to_string(k), "hjb",
                             static_cast<int>(k));
    }
  }
}

}  // namespace

ScalarFlow hjb_backward(const ScalarFlow& f_flow, const MfgConfig& config) {
  config.validate();
  const std::vector<double> times = config.sample_times();
  if (f_flow.size() != times.size()) throw InputError("hjb_backward: F has the wrong number of samples");
  const Grid grid = f_flow.front().grid();
  for (const auto& f : f_flow) {
    if (!(f.grid() == grid)) throw InputError("hjb_backward: F samples live on different grids");
  }
  const std::size_t n = grid.size();
  const Boundary bc = config.boundary;
  Hamiltonian hamiltonian(grid, bc, config.alpha);

  ScalarFlow out(times.size(), ScalarField(grid));
  std::vector<double> w(n, 0.0), h(n), stage(n), lap(n), rhs(n);
  std::vector<double> f_lo(n), f_hi(n);

  // Crank-Nicolson for w_tau = eps Lap w over a step of length tau.
  auto diffuse = [&](double tau) {
    const double c = 0.5 * tau * config.epsilon;
    detail::apply_laplacian(grid, bc, c, w, lap);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] + lap[i];
    detail::solve_shifted_laplacian(grid, bc, c, rhs, w);
  };

  long substeps = 0;
  for (std::size_t k = times.size() - 1; k-- > 0;) {
    const auto fa = f_flow[k].values(), fb = f_flow[k + 1].values();
    const double t_lo = times[k], t_hi = times[k + 1], span = t_hi - t_lo;
    // F at time t, linear between the bracketing samples.
    auto source_at = [&](double t, std::vector<double>& f) {
      const double s = (t - t_lo) / span;
      for (std::size_t i = 0; i < n; ++i) f[i] = (1.0 - s) * fa[i] + s * fb[i];
    };

    double t = t_hi;
    while (t > t_lo) {
      // Backward in t is forward in tau = T - t: w_tau = eps Lap w - H(Dw) + F.
      const double rate = hamiltonian.evaluate(w, h);
      double dt = t - t_lo;
      if (rate * dt > config.cfl) {
        const double steps = std::ceil(rate * dt / config.cfl);
        dt = (t - t_lo) / steps;
      }
      diffuse(0.5 * dt);
      hamiltonian.evaluate(w, h);
      source_at(t, f_hi);
      source_at(std::max(t - dt, t_lo), f_lo);
      for (std::size_t i = 0; i < n; ++i) stage[i] = w[i] + dt * (f_hi[i] - h[i]);
      hamiltonian.evaluate(stage, h);
      for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 * w[i] + 0.5 * (stage[i] + dt * (f_lo[i] - h[i]));
      diffuse(0.5 * dt);
      t = (t - dt - t_lo <= 1e-12 * span) ? t_lo : t - dt;
      if (++substeps > kMaxSubsteps) {
        throw SolverDiagnostic("hjb_backward exceeded the substep budget", "hjb", static_cast<int>(k));
      }
    }
    check_field(w, k);
    std::copy(w.begin(), w.end(), out[k].values().begin());
  }
  return out;
}

}  // namespace swarmfield
