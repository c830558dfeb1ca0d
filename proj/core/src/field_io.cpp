#include "swarmfield/field_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "swarmfield/error.hpp"

namespace swarmfield {

void write_field_csv(std::ostream& os, const ScalarField& f, double t) {
  const Grid& g = f.grid();
  os << kCsvVersionLine << '\n';
  os << std::setprecision(17);
  os << "# grid " << g.nx() << ' ' << g.ny() << ' ' << g.x_min() << ' ' << g.x_max() << ' '
     << g.y_min() << ' ' << g.y_max() << ' ' << t << '\n';
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i) os << ',';
      os << f(i, j);
    }
    os << '\n';
  }
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f, double t) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path.string() + " for writing");
  write_field_csv(os, f, t);
}

FieldSnapshot read_field_csv(std::istream& is) {
  std::string line;
  int nx = 0, ny = 0;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0, t = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.rfind("# grid", 0) == 0) {
      std::istringstream hs(line.substr(6));
      if (!(hs >> nx >> ny >> x0 >> x1 >> y0 >> y1 >> t)) {
        throw InputError("malformed field header: " + line);
      }
      have_header = true;
      break;
    }
    if (!line.empty() && line[0] != '#') break;
  }
  if (!have_header) throw InputError("field snapshot is missing its '# grid' header");

  Grid grid(x0, x1, y0, y1, nx, ny);
  ScalarField f(grid);
  for (int j = 0; j < ny; ++j) {
    if (!std::getline(is, line)) throw InputError("field snapshot has too few rows");
    std::istringstream rs(line);
    std::string cell;
    for (int i = 0; i < nx; ++i) {
      if (!std::getline(rs, cell, ',')) throw InputError("field snapshot row is too short");
      try {
        f(i, j) = std::stod(cell);
      } catch (const std::exception&) {
        throw InputError("field snapshot has a non-numeric entry: " + cell);
      }
    }
  }
  return {std::move(f), t};
}

FieldSnapshot read_field_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path.string());
  return read_field_csv(is);
}

}  // namespace swarmfield
