#pragma once

#include <span>
#include <vector>

#include "swarmfield/grid.hpp"
#include "swarmfield/mfg.hpp"

namespace swarmfield::detail {

/// Ghost-aware neighbour index along one axis.
inline int wrap_index(int k, int n, Boundary bc) noexcept {
  if (k >= 0 && k < n) return k;
  if (bc == Boundary::periodic) return ((k % n) + n) % n;
  return k < 0 ? -k - 1 : 2 * n - k - 1;
}

/// Normal velocities on cell faces. x(i, j), i = 0..nx, sits between cells
/// (i - 1, j) and (i, j); y(i, j), j = 0..ny, between (i, j - 1) and (i, j).
/// Under periodic boundaries faces 0 and n are the same face and carry the
/// same value.
struct FaceVelocity {
  explicit FaceVelocity(const Grid& g)
      : nx(g.nx()),
        ny(g.ny()),
        ux(static_cast<std::size_t>(nx + 1) * ny, 0.0),
        uy(static_cast<std::size_t>(nx) * (ny + 1), 0.0) {}

  double& x(int i, int j) noexcept { return ux[static_cast<std::size_t>(j) * (nx + 1) + i]; }
  double x(int i, int j) const noexcept { return ux[static_cast<std::size_t>(j) * (nx + 1) + i]; }
  double& y(int i, int j) noexcept { return uy[static_cast<std::size_t>(j) * nx + i]; }
  double y(int i, int j) const noexcept { return uy[static_cast<std::size_t>(j) * nx + i]; }

  /// max over cells of |u_x| / dx + |u_y| / dy, using the larger face on
  /// each axis. dt times this is the Courant number.
  double courant_rate(double dx, double dy) const noexcept;

  int nx, ny;
  std::vector<double> ux, uy;
};

/// u = gain * (target - x) sampled on faces; zero on Neumann walls.
FaceVelocity homing_velocity(const Grid& g, Point target, double gain, Boundary bc);

/// u = -factor * grad w by one-sided differences across each face.
FaceVelocity potential_velocity(const ScalarField& w, double factor, Boundary bc);

/// (1 - s) a + s b.
FaceVelocity lerp(const FaceVelocity& a, const FaceVelocity& b, double s);

/// Solves (I - coef * Lap) x = rhs with the compact Laplacian by Jacobi
/// sweeps started from rhs. The iteration matrix is nonnegative, so a
/// nonnegative rhs stays nonnegative.
void solve_shifted_laplacian(const Grid& g, Boundary bc, double coef, std::span<const double> rhs,
                             std::span<double> x);

/// y = coef * Lap x (compact stencil).
void apply_laplacian(const Grid& g, Boundary bc, double coef, std::span<const double> x,
                     std::span<double> y);

/// Finite-volume advection-diffusion m_t + div(u m) = eps Lap m.
///
/// Advection is a MUSCL reconstruction with the minmod limiter advanced by
/// the two-stage SSP Runge-Kutta scheme; diffusion is one backward Euler
/// step. Both parts telescope, so mass changes only by round-off.
class Transport {
 public:
  Transport(const Grid& grid, Boundary bc, double epsilon);

  void step(std::vector<double>& m, const FaceVelocity& u, double dt);

  long clip_events() const noexcept { return clips_; }

 private:
  // out = -div(u m)
  void advection_rate(const std::vector<double>& m, const FaceVelocity& u, std::vector<double>& out);

  Grid grid_;
  Boundary bc_;
  double epsilon_;
  long clips_ = 0;
  std::vector<double> rate_, stage_, rhs_, slope_x_, slope_y_;
};

/// Drives Transport between sample instants with Courant-limited substeps.
/// velocity(k) is the face velocity at sample k; it is interpolated linearly
/// in time and evaluated at substep midpoints.
template <class VelocityAt>
DensityFlow transport_flow(const DensityField& m0, std::span<const double> times, Boundary bc,
                           double epsilon, double cfl, VelocityAt&& velocity, FlowStats* stats);

}  // namespace swarmfield::detail

#include "transport_flow.ipp"
