#pragma once

#include <stdexcept>
#include <string>

namespace rfimdi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A 2x2 or 4x4 operator that is not Hermitian within tolerance.
class InvalidOperatorError : public Error {
 public:
  using Error::Error;
};

// Announcement operator fails the PSD check.
class InvalidChannelError : public Error {
 public:
  using Error::Error;
};

// The two Z-basis preparations coincide up to a global phase.
class DegenerateSourceError : public Error {
 public:
  using Error::Error;
};

// A computed yield is negative beyond float noise.
class InconsistentModelError : public Error {
 public:
  using Error::Error;
};

// The sixteen-equation system is singular or too ill-conditioned to solve.
class SingularPreparationError : public Error {
 public:
  SingularPreparationError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

// Observed gains admit no consistent yield assignment.
class DataInconsistencyError : public Error {
 public:
  using Error::Error;
};

// A rate denominator (total yield or gain) is zero.
class NoSignalError : public Error {
 public:
  using Error::Error;
};

class MalformedProgramError : public Error {
 public:
  using Error::Error;
};

class NumericalFailureError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfimdi
