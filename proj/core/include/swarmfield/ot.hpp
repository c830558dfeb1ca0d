#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "swarmfield/grid.hpp"

namespace swarmfield {

enum class SinkhornKernel {
  separable,  ///< axis-by-axis reductions, O(n^3) per update on an n x n grid
  dense,      ///< full log-sum-exp over every cell pair, O(n^4); reference path
};

struct SinkhornParams {
  double eps_ot = 0.1;  ///< entropic regularization, length^2
  int max_iter = 2000;
  double tol = 1e-6;  ///< L1 violation of the first marginal
  SinkhornKernel kernel = SinkhornKernel::separable;
  /// Per-axis distances wrap around the domain (flat torus) instead of
  /// measuring straight across the box.
  bool periodic = false;

  void validate() const;
};

/// Densities are floored here before entering Sinkhorn or KL.
inline constexpr double kDensityFloor = 1e-12;

/// Entropic transport between two grid densities with cost |x - y|^2
/// between cell centers (wrapped per axis when params.periodic). The plan is
///   pi_kl = a_k b_l exp((f_k + g_l - C_kl) / eps_ot),
/// with a, b the floored cell masses; f and g are defined on every cell.
struct SinkhornResult {
  ScalarField f;
  ScalarField g;
  double cost = 0.0;  ///< regularized cost <a, f> + <b, g>
  int iterations = 0;
  bool converged = false;
  double marginal_error = 0.0;
};

/// Log-domain Sinkhorn. Cold starts anneal eps from the squared domain
/// diameter down to eps_ot; a warm start on the same grid skips annealing.
/// Never throws on non-convergence: check `converged`.
SinkhornResult sinkhorn(const DensityField& mu, const DensityField& m,
                        const SinkhornParams& params,
                        const SinkhornResult* warm_start = nullptr);

/// OT_eps(rho, rho) by the symmetric fixed-point iteration f <- (f + T(f)) / 2.
/// The result has f == g.
SinkhornResult sinkhorn_self(const DensityField& rho, const SinkhornParams& params,
                             const SinkhornResult* warm_start = nullptr);

/// S(mu, m) = OT(mu, m) - OT(mu, mu)/2 - OT(m, m)/2 together with its first
/// variation in m, shifted so that int potential dm = 0.
struct SinkhornDivergence {
  double value = 0.0;  ///< raw debiased value; may dip below 0 by round-off
  ScalarField potential;
  bool converged = false;
  SinkhornResult cross;        ///< OT(mu, m)
  SinkhornResult target_self;  ///< OT(m, m)
};

/// mu_self must be sinkhorn_self(mu, params); callers evaluating many m
/// against one mu compute it once.
SinkhornDivergence sinkhorn_divergence(const DensityField& mu, const DensityField& m,
                                       const SinkhornParams& params,
                                       const SinkhornResult& mu_self,
                                       const SinkhornDivergence* warm_start = nullptr);

/// Squared W2 estimate: the debiased Sinkhorn divergence, clamped at 0.
double w2_squared(const DensityField& mu, const DensityField& m, const SinkhornParams& params);

/// First variation of w2_squared(mu, .) at m, zero mean against m.
ScalarField first_variation_w2(const DensityField& mu, const DensityField& m,
                               const SinkhornParams& params);

/// Bures formula for isotropic Gaussians in 2-D:
/// |c1 - c2|^2 + 2 (sqrt(v1) - sqrt(v2))^2.
double gaussian_w2_closed_form(Point c1, double v1, Point c2, double v2);

/// sum p log(p / q) dx dy with 0 log 0 = 0; q is floored at kDensityFloor.
double kl_divergence(const DensityField& p, const DensityField& q);

// -- distance sweeps ----------------------------------------------------------

enum class SweepMode {
  translation,  ///< N((s, s), 0.85 I) against N((0, 0), 0.85 I); s from start to stop
  variance,     ///< N((0, 0), s I) against N((2, 2), 1.5 I); s from start to stop
};

struct SweepSpec {
  SweepMode mode = SweepMode::translation;
  double start = 2.0;
  double stop = 0.0;
  int samples = 41;
  Grid grid{-5.0, 5.0, -5.0, 5.0, 60, 60};
  SinkhornParams sinkhorn;

  void validate() const;
};

SweepSpec default_sweep(SweepMode mode);

using DistanceFunction = std::function<double(const DensityField&, const DensityField&)>;

struct NamedDistance {
  std::string name;
  DistanceFunction distance;
};

/// Columns are `sweep_value, w2, kl` followed by any extra distances.
struct DistanceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
};

DistanceTable distance_sweep(const SweepSpec& spec, std::span<const NamedDistance> extra = {});

void write_table_csv(std::ostream& os, const DistanceTable& table);

}  // namespace swarmfield
