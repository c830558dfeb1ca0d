#pragma once

#include <stdexcept>
#include <string>

namespace swarmfield {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid, scenario or parameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or mismatched inputs to a numerical routine (unsorted time
/// axes, series of different lengths, fields on different grids).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function (negative squared
/// distance, nonpositive variance).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A density that cannot be normalized: zero, negative or non-finite mass.
class DegenerateDensityError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown inside a PDE solve (NaN, blow-up).
class SolverDiagnostic : public Error {
 public:
  SolverDiagnostic(const std::string& what, std::string stage, int step)
      : Error(what), stage_(std::move(stage)), step_(step) {}

  const std::string& stage() const noexcept { return stage_; }
  int step() const noexcept { return step_; }

 private:
  std::string stage_;
  int step_;
};

}  // namespace swarmfield
