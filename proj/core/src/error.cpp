#include "semicoupling/error.hpp"

namespace semicoupling {

DensitySampleError::DensitySampleError(std::size_t cell, double value)
    : ValidationError("source density sample at cell " + std::to_string(cell) +
                      " is negative or not finite (" + std::to_string(value) + ")"),
      cell_(cell),
      value_(value) {}

AbundanceError::AbundanceError(double source_mass, double target_mass)
    : ValidationError("source is not abundant: target mass " + std::to_string(target_mass) +
                      " >= source mass " + std::to_string(source_mass)),
      source_mass_(source_mass),
      target_mass_(target_mass) {}

ConvergenceError::ConvergenceError(const std::string& what, int iterations, double residual)
    : Error(what + " (iterations " + std::to_string(iterations) + ", residual " +
            std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

SchemaError::SchemaError(const std::string& key, int line, const std::string& message)
    : Error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + "key '" + key +
            "': " + message),
      key_(key),
      line_(line) {}

}  // namespace semicoupling
