#include "swarmfield/attrition.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "swarmfield/error.hpp"
#include "swarmfield/field_io.hpp"

namespace swarmfield {

void AttritionParams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("attrition lambda must be finite and nonnegative");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("attrition sigma must be positive");
}

namespace {

void check_r2(double r2) {
  if (!(r2 >= 0.0)) {
    std::ostringstream os;
    os << "attrition rate needs a nonnegative squared distance, got " << r2;
    throw DomainError(os.str());
  }
}

}  // namespace

double attrition_rate(const AttritionParams& p, double r2) {
  check_r2(r2);
  return p.lambda * std::exp(-r2 / p.sigma);
}

double attrition_rate_derivative(const AttritionParams& p, double r2) {
  return -attrition_rate(p, r2) / p.sigma;
}

AttritionFunction exponential_attrition(const AttritionParams& p) {
  p.validate();
  return [p](double r2) { return attrition_rate(p, r2); };
}

namespace {

void check_times(std::span<const double> times) {
  if (times.empty()) throw InputError("survival: empty time axis");
  if (times[0] != 0.0) throw InputError("survival: time axis must start at 0");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw InputError("survival: times must be strictly increasing");
  }
}

}  // namespace

std::vector<double> cumulative_trapezoid(std::span<const double> values,
                                         std::span<const double> times) {
  if (values.size() != times.size()) throw InputError("series and time axis differ in length");
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t k = 1; k < values.size(); ++k) {
    out[k] = out[k - 1] + 0.5 * (times[k] - times[k - 1]) * (values[k] + values[k - 1]);
  }
  return out;
}

std::vector<double> survival_q(std::span<const double> d_att, std::span<const double> times) {
  check_times(times);
  if (d_att.size() != times.size()) throw InputError("survival_q: rate series length mismatch");
  for (double d : d_att) {
    if (!(d >= 0.0)) throw InputError("survival_q: attrition rates must be nonnegative");
  }
  auto out = cumulative_trapezoid(d_att, times);
  for (double& v : out) v = std::exp(-v);
  return out;
}

std::vector<double> survival_p(std::span<const double> d_h, std::span<const double> q,
                               std::span<const double> times) {
  check_times(times);
  if (d_h.size() != times.size() || q.size() != times.size()) {
    throw InputError("survival_p: series length mismatch");
  }
  std::vector<double> integrand(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(d_h[k] >= 0.0)) throw InputError("survival_p: attrition rates must be nonnegative");
    integrand[k] = d_h[k] * q[k];
  }
  auto out = cumulative_trapezoid(integrand, times);
  for (double& v : out) v = std::exp(-v);
  return out;
}

void write_trace_csv(std::ostream& os, const SurvivalTrace& tr) {
  os << kCsvVersionLine << '\n';
  os << "t,w2_def_att_sq,w2_att_hvu_sq,d_att,d_h,Q,P\n";
  os << std::setprecision(12);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << tr.times[k] << ',' << tr.w2_def_att[k] << ',' << tr.w2_att_hvu[k] << ',' << tr.d_att[k]
       << ',' << tr.d_h[k] << ',' << tr.q[k] << ',' << tr.p[k] << '\n';
  }
}

}  // namespace swarmfield
