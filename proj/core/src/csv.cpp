#include <iomanip>
#include <ostream>

#include "swarmfield/field_io.hpp"
#include "swarmfield/scenario.hpp"

namespace swarmfield {

void write_residuals_csv(std::ostream& os, const std::vector<double>& residuals) {
  os << kCsvVersionLine << "\niteration,l1_change\n" << std::setprecision(12);
  for (std::size_t i = 0; i < residuals.size(); ++i) os << i + 1 << ',' << residuals[i] << '\n';
}

void write_bounds_csv(std::ostream& os, const BoundsReport& report) {
  os << kCsvVersionLine << '\n' << std::setprecision(12);
  os << "# K " << report.k << " K_w " << report.k_value << " slack " << report.slack
     << " violations " << report.violation_count << " max_ratio " << report.max_violation_ratio << '\n';
  os << "t,min_m,max_m,lower_envelope,upper_envelope,violations\n";
  for (const auto& s : report.samples) {
    os << s.t << ',' << s.min_m << ',' << s.max_m << ',' << s.lower << ',' << s.upper << ','
       << s.violations << '\n';
  }
}

void write_summary_csv(std::ostream& os, const MfgSolution& sol, const BoundsReport& report) {
  os << kCsvVersionLine << "\nkey,value\n" << std::setprecision(12);
  os << "converged," << (sol.converged ? 1 : 0) << '\n';
  os << "outer_iterations," << sol.outer_iterations << '\n';
  os << "final_residual," << (sol.residuals.empty() ? 0.0 : sol.residuals.back()) << '\n';
  os << "P_T," << sol.trace.p.back() << '\n';
  os << "Q_T," << sol.trace.q.back() << '\n';
  os << "objective," << sol.objective() << '\n';
  os << "clip_events," << sol.clip_events << '\n';
  os << "sinkhorn_failures," << sol.sinkhorn_failures << '\n';
  os << "max_mass_error," << sol.max_mass_error << '\n';
  os << "K," << report.k << '\n';
  os << "K_w," << report.k_value << '\n';
  os << "bounds_violations," << report.violation_count << '\n';
}

}  // namespace swarmfield
