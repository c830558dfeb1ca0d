#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace swarmfield {

/// Exponential attrition d(r2) = lambda * exp(-r2 / sigma), where r2 is a
/// squared distance (Euclidean for agents, squared W2 for populations).
/// lambda = 0 switches a weapon off.
struct AttritionParams {
  double lambda = 0.0;  ///< peak rate, 1/time
  double sigma = 1.0;   ///< squared-distance scale, length^2

  void validate() const;
};

double attrition_rate(const AttritionParams& p, double r2);

/// d/d(r2) of attrition_rate; always -attrition_rate / sigma.
double attrition_rate_derivative(const AttritionParams& p, double r2);

/// Any rate-of-squared-distance law; exponential_attrition() adapts the
/// built-in shape, other shapes (e.g. an inverted normal CDF) are plugged in
/// directly.
using AttritionFunction = std::function<double(double r2)>;
AttritionFunction exponential_attrition(const AttritionParams& p);

/// Q(t_k) = exp(-int_0^{t_k} d_att), trapezoidal in time.
std::vector<double> survival_q(std::span<const double> d_att, std::span<const double> times);

/// P(t_k) = exp(-int_0^{t_k} d_h * Q), trapezoidal in time.
std::vector<double> survival_p(std::span<const double> d_h, std::span<const double> q,
                               std::span<const double> times);

/// Trapezoidal cumulative integral with out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> values,
                                         std::span<const double> times);

struct SurvivalTrace {
  std::vector<double> times;
  std::vector<double> w2_def_att;  ///< squared W2 between defenders and attackers
  std::vector<double> w2_att_hvu;  ///< squared W2 between attackers and the HVU
  std::vector<double> d_att;
  std::vector<double> d_h;
  std::vector<double> q;
  std::vector<double> p;

  std::size_t size() const noexcept { return times.size(); }
};

/// Columns: t, w2_def_att_sq, w2_att_hvu_sq, d_att, d_h, Q, P.
void write_trace_csv(std::ostream& os, const SurvivalTrace& trace);

}  // namespace swarmfield
