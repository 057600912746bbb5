#pragma once

#include <stdexcept>
#include <string>

namespace eitsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The steady-state linear system is singular (all rates zero).
class DegenerateParameters : public Error {
 public:
  using Error::Error;
};

/// Time integration did not settle before the end time.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Data carry no resonance to fit (constant spectrum, too few points).
class DegenerateData : public Error {
 public:
  using Error::Error;
};

/// Phase jumps between neighbouring transfer-function samples are too large
/// to unwrap unambiguously.
class PhaseResolutionError : public Error {
 public:
  using Error::Error;
};

/// Pulse spectrum does not fit inside the sampled transfer window.
class BandwidthOverflow : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration. `line` is 0 when the problem
/// is not tied to one line of the file.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, unsigned long line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  unsigned long line() const noexcept { return line_; }

 private:
  unsigned long line_;
};

/// A computed result violates passivity or the density-matrix trace.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace eitsim
