#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semicoupling {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad sample, bad shape, violated invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A source sample that is negative or not finite.
class DensitySampleError : public ValidationError {
 public:
  DensitySampleError(std::size_t cell, double value);
  std::size_t cell() const noexcept { return cell_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t cell_;
  double value_;
};

/// Target mass is not strictly below the source mass.
class AbundanceError : public ValidationError {
 public:
  AbundanceError(double source_mass, double target_mass);
  double source_mass() const noexcept { return source_mass_; }
  double target_mass() const noexcept { return target_mass_; }

 private:
  double source_mass_;
  double target_mass_;
};

/// Evaluation outside the natural domain of a function: a cost pole,
/// an inactive point handed to a subdifferential, an active point
/// handed to the off-domain potential.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The dual ascent did not reach the mass tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual);
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Structured-text input that does not match the documented schema.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& key, int line, const std::string& message);
  const std::string& key() const noexcept { return key_; }
  /// 1-based line number, or 0 when unknown.
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace semicoupling
