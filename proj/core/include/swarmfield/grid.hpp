#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace swarmfield {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class Boundary { neumann, periodic };

/// Uniform cell-centered grid on a rectangle. Cell (i, j) has center
/// (x_min + (i + 1/2) dx, y_min + (j + 1/2) dy); storage is row-major with
/// the x index fastest, so a flat index is j * nx + i.
class Grid {
 public:
  Grid(double x_min, double x_max, double y_min, double y_max, int nx, int ny);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_min() const noexcept { return y_min_; }
  double y_max() const noexcept { return y_max_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }
  double cell_area() const noexcept { return dx_ * dy_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

  double x_center(int i) const noexcept { return x_min_ + (i + 0.5) * dx_; }
  double y_center(int j) const noexcept { return y_min_ + (j + 0.5) * dy_; }
  Point center(int i, int j) const noexcept { return {x_center(i), y_center(j)}; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }

  bool contains(Point p) const noexcept;
  /// Cell containing p (points on the upper edges map to the last cell).
  std::pair<int, int> cell_of(Point p) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double x_min_, x_max_, y_min_, y_max_;
  int nx_, ny_;
  double dx_, dy_;
};

Grid make_grid(std::array<double, 4> bounds, int nx, int ny);

/// Real value per cell.
class ScalarField {
 public:
  explicit ScalarField(Grid grid, double fill = 0.0);
  ScalarField(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }

  double max_abs() const noexcept;
  bool all_finite() const noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Nonnegative per-cell density (1/area units). Construction rejects
/// negative or non-finite entries; unit mass is established by normalize().
class DensityField {
 public:
  explicit DensityField(Grid grid);
  DensityField(Grid grid, std::vector<double> values);
  explicit DensityField(ScalarField field);

  const Grid& grid() const noexcept { return field_.grid(); }
  std::span<const double> values() const noexcept { return field_.values(); }
  std::size_t size() const noexcept { return field_.size(); }
  double operator()(int i, int j) const noexcept { return field_(i, j); }
  double operator[](std::size_t k) const noexcept { return field_[k]; }

  const ScalarField& as_scalar() const noexcept { return field_; }

  double min() const noexcept;
  double max() const noexcept;

 private:
  friend class DensityEditor;
  ScalarField field_;
};

/// Write access for solvers that maintain the nonnegativity invariant
/// themselves (conservative upwind schemes).
class DensityEditor {
 public:
  static std::span<double> values(DensityField& d) noexcept { return d.field_.values(); }
};

struct VectorField {
  VectorField(Grid grid, double fill = 0.0);

  Grid grid;
  std::vector<double> x;
  std::vector<double> y;
};

// -- finite-difference operators -------------------------------------------
//
// Interior stencils are second-order central differences. Ghost cells are
// mirrored (f[-1] = f[0]) under Neumann boundaries and wrapped under periodic
// ones.

enum class LaplacianStencil {
  compact,  ///< 5-point stencil; the operator the PDE solvers use.
  wide,     ///< div(grad f) with central differences on both factors.
};

VectorField gradient(const ScalarField& f, Boundary bc = Boundary::neumann);
ScalarField laplacian(const ScalarField& f, Boundary bc = Boundary::neumann,
                      LaplacianStencil stencil = LaplacianStencil::compact);
ScalarField divergence(const VectorField& v, Boundary bc = Boundary::neumann);

/// Midpoint quadrature: sum of f * dx * dy.
double integrate(const ScalarField& f) noexcept;
double integrate(const DensityField& f) noexcept;

/// Per-cell absolute difference integrated over the grid.
double l1_distance(const DensityField& a, const DensityField& b);

struct NormalizeStats {
  std::size_t clamped = 0;  ///< negative cells set to zero before rescaling
};

/// Clamps negative round-off to zero, then rescales to unit mass.
/// Throws DegenerateDensityError when the remaining mass is not positive.
DensityField normalize(const ScalarField& f, NormalizeStats* stats = nullptr);
DensityField normalize(const DensityField& f);

/// Isotropic Gaussian N(center, variance * I) sampled at cell centers and
/// renormalized to unit mass on the grid.
DensityField gaussian_density(const Grid& grid, Point center, double variance);

/// First and second moments of a density about its own mean.
struct Moments {
  Point mean;
  double second_central = 0.0;  ///< E|X - mean|^2
};
Moments moments(const DensityField& d);

}  // namespace swarmfield
