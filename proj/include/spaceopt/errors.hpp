#pragma once

#include <stdexcept>
#include <string>

namespace spaceopt {

/// Bad inputs: malformed files, out-of-domain points, invalid arguments.
/// The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical breakdowns: covariances that cannot be factorized, model fits
/// that cannot proceed. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spaceopt
