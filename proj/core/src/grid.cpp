#include "swarmfield/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "swarmfield/error.hpp"

namespace swarmfield {

Grid::Grid(double x_min, double x_max, double y_min, double y_max, int nx, int ny)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), nx_(nx), ny_(ny) {
  if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
        std::isfinite(y_max))) {
    throw ConfigError("grid bounds must be finite");
  }
  if (!(x_min < x_max) || !(y_min < y_max)) {
    std::ostringstream os;
    os << "degenerate grid bounds [" << x_min << ", " << x_max << "] x [" << y_min << ", "
       << y_max << "]";
    throw ConfigError(os.str());
  }
  if (nx < 4 || ny < 4) {
    std::ostringstream os;
    os << "grid needs at least 4 cells per axis, got " << nx << " x " << ny;
    throw ConfigError(os.str());
  }
  dx_ = (x_max - x_min) / nx;
  dy_ = (y_max - y_min) / ny;
}

bool Grid::contains(Point p) const noexcept {
  return p.x >= x_min_ && p.x <= x_max_ && p.y >= y_min_ && p.y <= y_max_;
}

std::pair<int, int> Grid::cell_of(Point p) const {
  if (!contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") lies outside the grid";
    throw DomainError(os.str());
  }
  int i = static_cast<int>(std::floor((p.x - x_min_) / dx_));
  int j = static_cast<int>(std::floor((p.y - y_min_) / dy_));
  return {std::clamp(i, 0, nx_ - 1), std::clamp(j, 0, ny_ - 1)};
}

Grid make_grid(std::array<double, 4> bounds, int nx, int ny) {
  return Grid(bounds[0], bounds[1], bounds[2], bounds[3], nx, ny);
}

// -- fields -------------------------------------------------------------------

ScalarField::ScalarField(Grid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InputError("field value count does not match the grid");
  }
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void require_nonnegative(std::span<const double> values) {
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("density values must be finite and nonnegative");
    }
  }
}

}  // namespace

DensityField::DensityField(Grid grid) : field_(grid, 0.0) {}

DensityField::DensityField(Grid grid, std::vector<double> values)
    : field_(grid, std::move(values)) {
  require_nonnegative(field_.values());
}

DensityField::DensityField(ScalarField field) : field_(std::move(field)) {
  require_nonnegative(field_.values());
}

double DensityField::min() const noexcept {
  auto v = values();
  return *std::min_element(v.begin(), v.end());
}

double DensityField::max() const noexcept {
  auto v = values();
  return *std::max_element(v.begin(), v.end());
}

VectorField::VectorField(Grid g, double fill)
    : grid(g), x(g.size(), fill), y(g.size(), fill) {}

// -- operators ----------------------------------------------------------------

namespace {

// Index of the neighbour of cell k along one axis, with the ghost-cell rule
// of the boundary condition. Neumann mirrors the boundary cell itself.
inline int neighbour(int k, int n, Boundary bc) noexcept {
  if (k < 0) return bc == Boundary::periodic ? k + n : -k - 1;
  if (k >= n) return bc == Boundary::periodic ? k - n : 2 * n - k - 1;
  return k;
}

}  // namespace

VectorField gradient(const ScalarField& f, Boundary bc) {
  const Grid& g = f.grid();
  VectorField out(g);
  const int nx = g.nx(), ny = g.ny();
  const double hx = 0.5 / g.dx(), hy = 0.5 / g.dy();
  for (int j = 0; j < ny; ++j) {
    const int jm = neighbour(j - 1, ny, bc), jp = neighbour(j + 1, ny, bc);
    for (int i = 0; i < nx; ++i) {
      const int im = neighbour(i - 1, nx, bc), ip = neighbour(i + 1, nx, bc);
      const std::size_t k = g.index(i, j);
      out.x[k] = (f(ip, j) - f(im, j)) * hx;
      out.y[k] = (f(i, jp) - f(i, jm)) * hy;
    }
  }
  return out;
}

ScalarField divergence(const VectorField& v, Boundary bc) {
  const Grid& g = v.grid;
  ScalarField out(g);
  const int nx = g.nx(), ny = g.ny();
  const double hx = 0.5 / g.dx(), hy = 0.5 / g.dy();
  for (int j = 0; j < ny; ++j) {
    const int jm = neighbour(j - 1, ny, bc), jp = neighbour(j + 1, ny, bc);
    for (int i = 0; i < nx; ++i) {
      const int im = neighbour(i - 1, nx, bc), ip = neighbour(i + 1, nx, bc);
      out(i, j) = (v.x[g.index(ip, j)] - v.x[g.index(im, j)]) * hx +
                  (v.y[g.index(i, jp)] - v.y[g.index(i, jm)]) * hy;
    }
  }
  return out;
}

ScalarField laplacian(const ScalarField& f, Boundary bc, LaplacianStencil stencil) {
  if (stencil == LaplacianStencil::wide) return divergence(gradient(f, bc), bc);

  const Grid& g = f.grid();
  ScalarField out(g);
  const int nx = g.nx(), ny = g.ny();
  const double cx = 1.0 / (g.dx() * g.dx()), cy = 1.0 / (g.dy() * g.dy());
  for (int j = 0; j < ny; ++j) {
    const int jm = neighbour(j - 1, ny, bc), jp = neighbour(j + 1, ny, bc);
    for (int i = 0; i < nx; ++i) {
      const int im = neighbour(i - 1, nx, bc), ip = neighbour(i + 1, nx, bc);
      const double c = f(i, j);
      out(i, j) = (f(ip, j) - 2.0 * c + f(im, j)) * cx + (f(i, jp) - 2.0 * c + f(i, jm)) * cy;
    }
  }
  return out;
}

double integrate(const ScalarField& f) noexcept {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_area();
}

double integrate(const DensityField& f) noexcept { return integrate(f.as_scalar()); }

double l1_distance(const DensityField& a, const DensityField& b) {
  if (!(a.grid() == b.grid())) throw InputError("l1_distance: densities live on different grids");
  double s = 0.0;
  auto av = a.values(), bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) s += std::abs(av[k] - bv[k]);
  return s * a.grid().cell_area();
}

DensityField normalize(const ScalarField& f, NormalizeStats* stats) {
  std::vector<double> v(f.values().begin(), f.values().end());
  std::size_t clamped = 0;
  double total = 0.0;
  for (double& x : v) {
    if (!std::isfinite(x)) throw DegenerateDensityError("normalize: non-finite density value");
    if (x < 0.0) {
      x = 0.0;
      ++clamped;
    }
    total += x;
  }
  total *= f.grid().cell_area();
  if (!(total > 0.0)) throw DegenerateDensityError("normalize: density has no positive mass");
  const double scale = 1.0 / total;
  for (double& x : v) x *= scale;
  if (stats) stats->clamped += clamped;
  return DensityField(f.grid(), std::move(v));
}

DensityField normalize(const DensityField& f) { return normalize(f.as_scalar()); }

DensityField gaussian_density(const Grid& grid, Point center, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw ConfigError("gaussian_density: variance must be positive");
  }
  if (!grid.contains(center)) throw ConfigError("gaussian_density: center lies outside the domain");
  ScalarField f(grid);
  const double norm = 1.0 / (2.0 * std::numbers::pi * variance);
  for (int j = 0; j < grid.ny(); ++j) {
    const double ry = grid.y_center(j) - center.y;
    for (int i = 0; i < grid.nx(); ++i) {
      const double rx = grid.x_center(i) - center.x;
      f(i, j) = norm * std::exp(-(rx * rx + ry * ry) / (2.0 * variance));
    }
  }
  return normalize(f);
}

Moments moments(const DensityField& d) {
  const Grid& g = d.grid();
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double w = d(i, j);
      mass += w;
      mx += w * g.x_center(i);
      my += w * g.y_center(j);
    }
  }
  if (!(mass > 0.0)) throw DegenerateDensityError("moments: density has no mass");
  mx /= mass;
  my /= mass;
  double m2 = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double rx = g.x_center(i) - mx, ry = g.y_center(j) - my;
      m2 += d(i, j) * (rx * rx + ry * ry);
    }
  }
  return {{mx, my}, m2 / mass};
}

}  // namespace swarmfield
