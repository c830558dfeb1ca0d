#pragma once

#include <span>
#include <vector>

#include "swarmfield/grid.hpp"
#include "swarmfield/ot.hpp"

namespace swarmfield::detail {

/// Entropic soft-min against the squared-distance cost between cell centers:
///
///   out_k = -eps * log sum_l exp((pot_l - C_kl) / eps + logw_l)
///
/// The separable path factors C = Cx + Cy and reduces one axis at a time.
class LogKernel {
 public:
  LogKernel(const Grid& grid, double eps, SinkhornKernel mode, bool periodic = false);

  double eps() const noexcept { return eps_; }

  void softmin(std::span<const double> pot, std::span<const double> logw,
               std::span<double> out);

 private:
  void softmin_dense(std::span<const double> logits, std::span<double> out);
  void softmin_separable(std::span<const double> logits, std::span<double> out);

  Grid grid_;
  double eps_;
  SinkhornKernel mode_;
  // 1-D tables: scaled cost (x_o - x_k)^2 / eps and its exponential.
  std::vector<double> cost_x_, kern_x_, cost_y_, kern_y_;
  std::vector<double> logits_, stage_;
};

}  // namespace swarmfield::detail
