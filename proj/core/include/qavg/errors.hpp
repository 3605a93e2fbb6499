#pragma once

#include <stdexcept>
#include <string>

namespace qavg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation
/// (e.g. a chemical potential at or above the bottom of the spectrum).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A requested tolerance could not be met within the iteration budget.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a configured size cap.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing or refinement failed; carries the last bracket.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double lower, double upper)
      : Error(what + " [bracket " + std::to_string(lower) + ", " + std::to_string(upper) + "]"),
        lower_(lower),
        upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace qavg
