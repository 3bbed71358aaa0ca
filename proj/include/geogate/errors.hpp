#pragma once

#include <stdexcept>
#include <string>

namespace geogate {

// Bad input values or preconditions the caller could have checked.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Rotating frame undefined (omega1 == 0 and detuning == 0).
class DegenerateFrame : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested integration accuracy cannot be met with the given step count.
class ToleranceUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Loop-2 cyclic axis does not connect to loop 1.
class ConventionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class NonphysicalProcess : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CalibrationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace geogate
