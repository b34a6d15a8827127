#pragma once

#include <stdexcept>
#include <string>

namespace chiralcat {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Poisson tail of the coherent amplitude exceeds the allowed threshold.
class TruncationTooSmall : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A detuning that appears in a denominator is zero.
class DegenerateDetuning : public Error {
 public:
  using Error::Error;
};

/// Post-selection onto a branch whose probability is (numerically) zero.
class NullBranch : public Error {
 public:
  using Error::Error;
};

class IntegratorFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace chiralcat
