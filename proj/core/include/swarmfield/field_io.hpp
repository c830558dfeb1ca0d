#pragma once

#include <filesystem>
#include <iosfwd>

#include "swarmfield/grid.hpp"

namespace swarmfield {

inline constexpr const char* kCsvVersionLine = "# swarmfield-csv v1";

/// Field snapshot layout:
///
///   # swarmfield-csv v1
///   # grid nx ny x_min x_max y_min y_max t
///   ny rows of nx comma-separated values (row = y index, column = x index)
void write_field_csv(std::ostream& os, const ScalarField& f, double t);
void write_field_csv(const std::filesystem::path& path, const ScalarField& f, double t);

struct FieldSnapshot {
  ScalarField field;
  double t = 0.0;
};

/// Inverse of write_field_csv. The version line is optional on input.
FieldSnapshot read_field_csv(std::istream& is);
FieldSnapshot read_field_csv(const std::filesystem::path& path);

}  // namespace swarmfield
