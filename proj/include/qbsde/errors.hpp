#ifndef QBSDE_ERRORS_HPP
#define QBSDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qbsde {

// Raised when an exponential-moment statistic leaves the representable
// range; callers treat this as "the required integrability fails here".
class OverflowError : public std::runtime_error {
public:
  explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by least-squares fits whose normal equations are unusable.
class RegressionError : public std::runtime_error {
public:
  RegressionError(const std::string& what, double condition)
      : std::runtime_error(what), condition_number(condition) {}
  double condition_number;
};

// Raised when a numerical scheme detects divergence (non-finite values).
class BlowUpError : public std::runtime_error {
public:
  BlowUpError(const std::string& what, int layer)
      : std::runtime_error(what), layer_index(layer) {}
  int layer_index;
};

// Raised when the inner fixed-point iteration fails to converge.
class PicardError : public std::runtime_error {
public:
  PicardError(const std::string& what, int layer, double residual)
      : std::runtime_error(what), layer_index(layer), residual(residual) {}
  int layer_index;
  double residual;
};

}  // namespace qbsde

#endif
