#pragma once

#include <stdexcept>
#include <string>

namespace qplane {

/// Problem size beyond a documented guard (k > 20000, dense Jacobi n > 600, ...).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Vector or matrix shapes that do not match.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure gave up (iteration cap, failed factorization, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qplane
