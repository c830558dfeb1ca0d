#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
extern "C" double exp(double) noexcept __attribute__((__simd__("notinbranch")));
#endif

#include <algorithm>
#include <cmath>
#include <sstream>

#include "log_kernel.hpp"
#include "swarmfield/error.hpp"
#include "swarmfield/ot.hpp"

namespace swarmfield {

void SinkhornParams::validate() const {
  if (!(eps_ot > 0.0) || !std::isfinite(eps_ot)) throw ConfigError("sinkhorn eps_ot must be positive");
  if (!(tol > 0.0)) throw ConfigError("sinkhorn tol must be positive");
  if (max_iter < 1) throw ConfigError("sinkhorn max_iter must be at least 1");
}

namespace {

struct Marginal {
  std::vector<double> weight;
  std::vector<double> log_weight;
};

// Floored cell masses renormalized to total mass one.
Marginal floored_marginal(const DensityField& d) {
  Marginal m;
  const auto v = d.values();
  m.weight.resize(v.size());
  double total = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    m.weight[k] = std::max(v[k], kDensityFloor);
    total += m.weight[k];
  }
  m.log_weight.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    m.weight[k] /= total;
    m.log_weight[k] = std::log(m.weight[k]);
  }
  return m;
}

double squared_diameter(const Grid& g) {
  const double lx = g.x_max() - g.x_min(), ly = g.y_max() - g.y_min();
  return lx * lx + ly * ly;
}

// Annealing schedule eps_0 = diameter^2, eps_{s+1} = eps_s / 2, floored at the
// target value.
class EpsSchedule {
 public:
  EpsSchedule(double start, double target) : eps_(std::max(start, target)), target_(target) {}
  double current() const noexcept { return eps_; }
  bool at_target() const noexcept { return eps_ <= target_; }
  void advance() noexcept { eps_ = std::max(target_, 0.5 * eps_); }

 private:
  double eps_;
  double target_;
};

// Row-marginal violation sum_k a_k |1 - exp((f_k - T(f)_k) / eps)|.
double marginal_violation(const std::vector<double>& a, std::span<const double> f,
                          const std::vector<double>& f_next, double eps) {
  double err = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    err += a[k] * std::abs(1.0 - std::exp((f[k] - f_next[k]) / eps));
  }
  return err;
}

double dot(const std::vector<double>& w, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * v[k];
  return s;
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw SolverDiagnostic(std::string("sinkhorn produced a non-finite ") + what, "sinkhorn", -1);
    }
  }
}

}  // namespace

SinkhornResult sinkhorn(const DensityField& mu, const DensityField& m, const SinkhornParams& params,
                        const SinkhornResult* warm_start) {
  params.validate();
  if (!(mu.grid() == m.grid())) throw InputError("sinkhorn: densities live on different grids");
  const Grid& grid = mu.grid();
  const Marginal a = floored_marginal(mu);
  const Marginal b = floored_marginal(m);

  SinkhornResult res{ScalarField(grid), ScalarField(grid)};
  const bool warm = warm_start && warm_start->f.grid() == grid;
  EpsSchedule schedule(warm ? params.eps_ot : squared_diameter(grid), params.eps_ot);
  if (warm) {
    std::copy(warm_start->f.values().begin(), warm_start->f.values().end(), res.f.values().begin());
    std::copy(warm_start->g.values().begin(), warm_start->g.values().end(), res.g.values().begin());
  }

  std::vector<double> f_next(grid.size());
  detail::LogKernel kernel(grid, schedule.current(), params.kernel, params.periodic);
  double err = 0.0;
  int it = 0;
  for (it = 1; it <= params.max_iter; ++it) {
    if (kernel.eps() != schedule.current()) {
      kernel = detail::LogKernel(grid, schedule.current(), params.kernel, params.periodic);
    }
    kernel.softmin(res.g.values(), b.log_weight, f_next);
    if (schedule.at_target()) {
      err = marginal_violation(a.weight, res.f.values(), f_next, params.eps_ot);
      if (err <= params.tol) {
        res.converged = true;
        break;
      }
    }
    std::copy(f_next.begin(), f_next.end(), res.f.values().begin());
    kernel.softmin(res.f.values(), a.log_weight, res.g.values());
    schedule.advance();
  }
  res.iterations = std::min(it, params.max_iter);
  res.marginal_error = err;
  check_finite(res.f.values(), "potential");
  check_finite(res.g.values(), "potential");
  res.cost = dot(a.weight, res.f.values()) + dot(b.weight, res.g.values());
  return res;
}

SinkhornResult sinkhorn_self(const DensityField& rho, const SinkhornParams& params,
                             const SinkhornResult* warm_start) {
  params.validate();
  const Grid& grid = rho.grid();
  const Marginal a = floored_marginal(rho);

  ScalarField f(grid);
  const bool warm = warm_start && warm_start->f.grid() == grid;
  EpsSchedule schedule(warm ? params.eps_ot : squared_diameter(grid), params.eps_ot);
  if (warm) std::copy(warm_start->f.values().begin(), warm_start->f.values().end(), f.values().begin());

  std::vector<double> f_next(grid.size());
  detail::LogKernel kernel(grid, schedule.current(), params.kernel, params.periodic);
  double err = 0.0;
  bool converged = false;
  int it = 0;
  for (it = 1; it <= params.max_iter; ++it) {
    if (kernel.eps() != schedule.current()) {
      kernel = detail::LogKernel(grid, schedule.current(), params.kernel, params.periodic);
    }
    kernel.softmin(f.values(), a.log_weight, f_next);
    if (schedule.at_target()) {
      err = marginal_violation(a.weight, f.values(), f_next, params.eps_ot);
      if (err <= params.tol) {
        converged = true;
        break;
      }
    }
    auto fv = f.values();
    for (std::size_t k = 0; k < fv.size(); ++k) fv[k] = 0.5 * (fv[k] + f_next[k]);
    schedule.advance();
  }
  check_finite(f.values(), "potential");

  SinkhornResult res{f, f};
  res.iterations = std::min(it, params.max_iter);
  res.converged = converged;
  res.marginal_error = err;
  res.cost = 2.0 * dot(a.weight, f.values());
  return res;
}

}  // namespace swarmfield
