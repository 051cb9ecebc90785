#pragma once

#include <stdexcept>
#include <string>

namespace qem {

// Invalid arguments or configuration (CLI exit code 1).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Numerical breakdown: state drift, divergent mitigation factor, failed fit
// (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

// Filesystem and output failures (CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qem
