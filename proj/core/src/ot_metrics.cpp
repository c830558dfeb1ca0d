#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>

#include "swarmfield/error.hpp"
#include "swarmfield/field_io.hpp"
#include "swarmfield/ot.hpp"

namespace swarmfield {

SinkhornDivergence sinkhorn_divergence(const DensityField& mu, const DensityField& m,
                                       const SinkhornParams& params,
                                       const SinkhornResult& mu_self,
                                       const SinkhornDivergence* warm_start) {
  SinkhornResult cross = sinkhorn(mu, m, params, warm_start ? &warm_start->cross : nullptr);
  SinkhornResult self =
      sinkhorn_self(m, params, warm_start ? &warm_start->target_self : nullptr);
  const double value = cross.cost - 0.5 * mu_self.cost - 0.5 * self.cost;
  const bool converged = cross.converged && self.converged && mu_self.converged;

  // d/dm of OT(mu, m) is g; d/dm of OT(m, m)/2 is the symmetric potential.
  ScalarField potential(m.grid());
  auto phi = potential.values();
  const auto g = cross.g.values();
  const auto s = self.f.values();
  const auto w = m.values();
  double mean = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    phi[k] = g[k] - s[k];
    mean += phi[k] * w[k];
    mass += w[k];
  }
  mean /= mass;
  for (double& v : phi) v -= mean;
  return {value, std::move(potential), converged, std::move(cross), std::move(self)};
}

double w2_squared(const DensityField& mu, const DensityField& m, const SinkhornParams& params) {
  const SinkhornResult mu_self = sinkhorn_self(mu, params);
  return std::max(0.0, sinkhorn_divergence(mu, m, params, mu_self).value);
}

ScalarField first_variation_w2(const DensityField& mu, const DensityField& m,
                               const SinkhornParams& params) {
  const SinkhornResult mu_self = sinkhorn_self(mu, params);
  return sinkhorn_divergence(mu, m, params, mu_self).potential;
}

double gaussian_w2_closed_form(Point c1, double v1, Point c2, double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0)) throw DomainError("gaussian_w2_closed_form: variances must be positive");
  const double dx = c1.x - c2.x, dy = c1.y - c2.y;
  const double ds = std::sqrt(v1) - std::sqrt(v2);
  return dx * dx + dy * dy + 2.0 * ds * ds;
}

double kl_divergence(const DensityField& p, const DensityField& q) {
  if (!(p.grid() == q.grid())) throw InputError("kl_divergence: densities live on different grids");
  double s = 0.0;
  const auto pv = p.values(), qv = q.values();
  for (std::size_t k = 0; k < pv.size(); ++k) {
    if (pv[k] > 0.0) s += pv[k] * std::log(pv[k] / std::max(qv[k], kDensityFloor));
  }
  return std::max(0.0, s * p.grid().cell_area());
}

// -- sweeps -------------------------------------------------------------------

void SweepSpec::validate() const {
  if (samples < 2) throw ConfigError("sweep needs at least 2 samples");
  if (!std::isfinite(start) || !std::isfinite(stop)) throw ConfigError("sweep bounds must be finite");
  if (mode == SweepMode::variance && (!(start > 0.0) || !(stop > 0.0))) {
    throw ConfigError("variance sweep bounds must be positive");
  }
  sinkhorn.validate();
}

SweepSpec default_sweep(SweepMode mode) {
  SweepSpec s;
  s.mode = mode;
  if (mode == SweepMode::translation) {
    s.start = 2.0;
    s.stop = 0.0;
    s.samples = 41;
  } else {
    s.start = 0.1;
    s.stop = 10.0;
    s.samples = 100;
  }
  return s;
}

std::vector<double> DistanceTable::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InputError("distance table has no column " + name);
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

DistanceTable distance_sweep(const SweepSpec& spec, std::span<const NamedDistance> extra) {
  spec.validate();
  constexpr double kTranslationVariance = 0.85;
  constexpr double kFixedVariance = 1.5;
  const Point fixed_variance_center{2.0, 2.0};

  const DensityField fixed =
      spec.mode == SweepMode::translation
          ? gaussian_density(spec.grid, {0.0, 0.0}, kTranslationVariance)
          : gaussian_density(spec.grid, fixed_variance_center, kFixedVariance);
  const SinkhornResult fixed_self = sinkhorn_self(fixed, spec.sinkhorn);

  DistanceTable table;
  table.columns = {"sweep_value", "w2", "kl"};
  for (const auto& d : extra) table.columns.push_back(d.name);

  std::optional<SinkhornDivergence> previous;
  for (int s = 0; s < spec.samples; ++s) {
    const double value = spec.start + (spec.stop - spec.start) * s / (spec.samples - 1);
    const DensityField moving =
        spec.mode == SweepMode::translation
            ? gaussian_density(spec.grid, {value, value}, kTranslationVariance)
            : gaussian_density(spec.grid, {0.0, 0.0}, value);
    SinkhornDivergence div = sinkhorn_divergence(fixed, moving, spec.sinkhorn, fixed_self,
                                                 previous ? &*previous : nullptr);
    std::vector<double> row{value, std::sqrt(std::max(0.0, div.value)), kl_divergence(moving, fixed)};
    for (const auto& d : extra) row.push_back(d.distance(moving, fixed));
    table.rows.push_back(std::move(row));
    previous = std::move(div);
  }
  return table;
}

void write_table_csv(std::ostream& os, const DistanceTable& table) {
  os << kCsvVersionLine << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n' << std::setprecision(12);
  for (const auto& r : table.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << '\n';
  }
}

}  // namespace swarmfield
