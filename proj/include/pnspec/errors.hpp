#pragma once

#include <stdexcept>
#include <string>

namespace pnspec {

/// Incompatible matrix shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input violates a structural convention (Hermiticity, algebra
/// membership, interlacing, calibration uniqueness, ...).
class ConventionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iteration caps, non-finite values, rank deficiency.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user-facing parameters (case strings, family sizes).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pnspec
