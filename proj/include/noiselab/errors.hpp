#pragma once

#include <stdexcept>
#include <string>

namespace noiselab {

// Bad input: contract violations a caller could have checked (maps to CLI exit 1).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical abort: non-finite values, CFL refusal, escape-driven aborts (CLI exit 2).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace noiselab
