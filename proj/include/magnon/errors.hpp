#pragma once

#include <stdexcept>
#include <string>

namespace magnon {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad dimension, parameter
/// domain, malformed configuration, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// L is not a multiple of q, or the cotranslation orbits are not free.
class CommensurabilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Configuration text could not be parsed.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, int line)
      : ValidationError("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Iterative eigensolver ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual)
      : Error(message + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A Chern sum that failed to round to an integer within tolerance.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A gap closed somewhere the topological analysis needs it open: touching
/// subbands, a vanishing link overlap, or a bound band merging with the
/// scattering continuum.
class TopologicalObstructionError : public Error {
 public:
  using Error::Error;
};

class DegenerateLinkError : public TopologicalObstructionError {
 public:
  using TopologicalObstructionError::TopologicalObstructionError;
};

class BandOverlapError : public TopologicalObstructionError {
 public:
  using TopologicalObstructionError::TopologicalObstructionError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace magnon
