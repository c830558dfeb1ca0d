#include "transport.hpp"

#include <algorithm>
#include <cmath>

namespace swarmfield::detail {

namespace {

inline double minmod(double a, double b) noexcept {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

constexpr int kMaxJacobiSweeps = 20000;
constexpr double kJacobiRelTol = 1e-15;

}  // namespace

double FaceVelocity::courant_rate(double dx, double dy) const noexcept {
  double rate = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double ax = std::max(std::abs(x(i, j)), std::abs(x(i + 1, j)));
      const double ay = std::max(std::abs(y(i, j)), std::abs(y(i, j + 1)));
      rate = std::max(rate, ax / dx + ay / dy);
    }
  }
  return rate;
}

FaceVelocity homing_velocity(const Grid& g, Point target, double gain, Boundary bc) {
  FaceVelocity u(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i <= g.nx(); ++i) u.x(i, j) = gain * (target.x - (g.x_min() + i * g.dx()));
  }
  for (int j = 0; j <= g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) u.y(i, j) = gain * (target.y - (g.y_min() + j * g.dy()));
  }
  for (int j = 0; j < g.ny(); ++j) {
    if (bc == Boundary::neumann) {
      u.x(0, j) = u.x(g.nx(), j) = 0.0;
    } else {
      u.x(g.nx(), j) = u.x(0, j);
    }
  }
  for (int i = 0; i < g.nx(); ++i) {
    if (bc == Boundary::neumann) {
      u.y(i, 0) = u.y(i, g.ny()) = 0.0;
    } else {
      u.y(i, g.ny()) = u.y(i, 0);
    }
  }
  return u;
}

FaceVelocity potential_velocity(const ScalarField& w, double factor, Boundary bc) {
  const Grid& g = w.grid();
  const int nx = g.nx(), ny = g.ny();
  FaceVelocity u(g);
  const double sx = -factor / g.dx(), sy = -factor / g.dy();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      u.x(i, j) = sx * (w(wrap_index(i, nx, bc), j) - w(wrap_index(i - 1, nx, bc), j));
    }
  }
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      u.y(i, j) = sy * (w(i, wrap_index(j, ny, bc)) - w(i, wrap_index(j - 1, ny, bc)));
    }
  }
  return u;
}

FaceVelocity lerp(const FaceVelocity& a, const FaceVelocity& b, double s) {
  FaceVelocity out = a;
  for (std::size_t k = 0; k < out.ux.size(); ++k) out.ux[k] = (1.0 - s) * a.ux[k] + s * b.ux[k];
  for (std::size_t k = 0; k < out.uy.size(); ++k) out.uy[k] = (1.0 - s) * a.uy[k] + s * b.uy[k];
  return out;
}

void apply_laplacian(const Grid& g, Boundary bc, double coef, std::span<const double> x,
                     std::span<double> y) {
  const int nx = g.nx(), ny = g.ny();
  const double cx = coef / (g.dx() * g.dx()), cy = coef / (g.dy() * g.dy());
  for (int j = 0; j < ny; ++j) {
    const int jm = wrap_index(j - 1, ny, bc), jp = wrap_index(j + 1, ny, bc);
    for (int i = 0; i < nx; ++i) {
      const int im = wrap_index(i - 1, nx, bc), ip = wrap_index(i + 1, nx, bc);
      const double c = x[g.index(i, j)];
      y[g.index(i, j)] = cx * (x[g.index(im, j)] - 2.0 * c + x[g.index(ip, j)]) +
                         cy * (x[g.index(i, jm)] - 2.0 * c + x[g.index(i, jp)]);
    }
  }
}

void solve_shifted_laplacian(const Grid& g, Boundary bc, double coef, std::span<const double> rhs,
                             std::span<double> x) {
  std::copy(rhs.begin(), rhs.end(), x.begin());
  if (coef == 0.0) return;
  const int nx = g.nx(), ny = g.ny();
  const double cx = coef / (g.dx() * g.dx()), cy = coef / (g.dy() * g.dy());
  const double inv_diag = 1.0 / (1.0 + 2.0 * cx + 2.0 * cy);
  double scale = 0.0;
  for (double v : rhs) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return;
  const double tol = kJacobiRelTol * scale;

  std::vector<double> next(x.size());
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double change = 0.0;
    for (int j = 0; j < ny; ++j) {
      const int jm = wrap_index(j - 1, ny, bc), jp = wrap_index(j + 1, ny, bc);
      for (int i = 0; i < nx; ++i) {
        const int im = wrap_index(i - 1, nx, bc), ip = wrap_index(i + 1, nx, bc);
        const std::size_t k = g.index(i, j);
        const double v = (rhs[k] + cx * (x[g.index(im, j)] + x[g.index(ip, j)]) +
                          cy * (x[g.index(i, jm)] + x[g.index(i, jp)])) *
                         inv_diag;
        change = std::max(change, std::abs(v - x[k]));
        next[k] = v;
      }
    }
    std::copy(next.begin(), next.end(), x.begin());
    if (change <= tol) break;
  }
}

Transport::Transport(const Grid& grid, Boundary bc, double epsilon)
    : grid_(grid), bc_(bc), epsilon_(epsilon) {
  rate_.resize(grid.size());
  stage_.resize(grid.size());
  rhs_.resize(grid.size());
  slope_x_.resize(grid.size());
  slope_y_.resize(grid.size());
}

void Transport::advection_rate(const std::vector<double>& m, const FaceVelocity& u,
                               std::vector<double>& out) {
  const Grid& g = grid_;
  const int nx = g.nx(), ny = g.ny();
  for (int j = 0; j < ny; ++j) {
    const int jm = wrap_index(j - 1, ny, bc_), jp = wrap_index(j + 1, ny, bc_);
    for (int i = 0; i < nx; ++i) {
      const int im = wrap_index(i - 1, nx, bc_), ip = wrap_index(i + 1, nx, bc_);
      const std::size_t k = g.index(i, j);
      slope_x_[k] = minmod(m[k] - m[g.index(im, j)], m[g.index(ip, j)] - m[k]);
      slope_y_[k] = minmod(m[k] - m[g.index(i, jm)], m[g.index(i, jp)] - m[k]);
    }
  }

  // Faces 0 and n: walls under Neumann (skipped), one shared face under
  // periodic boundaries, where the two loop ends feed cell 0 and drain
  // cell n - 1 with the same flux.
  const double idx = 1.0 / g.dx(), idy = 1.0 / g.dy();
  const bool walls = bc_ == Boundary::neumann;
  std::fill(out.begin(), out.end(), 0.0);
  for (int j = 0; j < ny; ++j) {
    for (int i = walls ? 1 : 0; i <= (walls ? nx - 1 : nx); ++i) {
      const double v = u.x(i, j);
      if (v == 0.0) continue;
      const std::size_t kl = g.index(wrap_index(i - 1, nx, bc_), j);
      const std::size_t kr = g.index(wrap_index(i, nx, bc_), j);
      const double flux = v > 0.0 ? v * (m[kl] + 0.5 * slope_x_[kl])
                                  : v * (m[kr] - 0.5 * slope_x_[kr]);
      if (i > 0) out[kl] -= flux * idx;
      if (i < nx) out[kr] += flux * idx;
    }
  }
  for (int j = walls ? 1 : 0; j <= (walls ? ny - 1 : ny); ++j) {
    for (int i = 0; i < nx; ++i) {
      const double v = u.y(i, j);
      if (v == 0.0) continue;
      const std::size_t kb = g.index(i, wrap_index(j - 1, ny, bc_));
      const std::size_t kt = g.index(i, wrap_index(j, ny, bc_));
      const double flux = v > 0.0 ? v * (m[kb] + 0.5 * slope_y_[kb])
                                  : v * (m[kt] - 0.5 * slope_y_[kt]);
      if (j > 0) out[kb] -= flux * idy;
      if (j < ny) out[kt] += flux * idy;
    }
  }
}

void Transport::step(std::vector<double>& m, const FaceVelocity& u, double dt) {
  advection_rate(m, u, rate_);
  for (std::size_t k = 0; k < m.size(); ++k) stage_[k] = m[k] + dt * rate_[k];
  advection_rate(stage_, u, rate_);
  for (std::size_t k = 0; k < m.size(); ++k) {
    double v = 0.5 * m[k] + 0.5 * (stage_[k] + dt * rate_[k]);
    if (v < 0.0) {
      ++clips_;
      v = 0.0;
    }
    rhs_[k] = v;
  }
  solve_shifted_laplacian(grid_, bc_, dt * epsilon_, rhs_, m);
}

}  // namespace swarmfield::detail
