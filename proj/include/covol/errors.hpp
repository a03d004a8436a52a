#pragma once

#include <stdexcept>
#include <string>

namespace covol {

/// Numerical failure (quadrature tolerance, non-PSD covariance, non-finite
/// statistic). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File / stream failure. The CLI maps this to exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace covol
