#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace interbank {

/// Coarse classification of failures; the CLI maps each one to its own exit status.
enum class ErrorCategory {
  Config,       // malformed or unknown configuration input
  Parameter,    // model invariant violated
  Numerical,    // Riccati blow-up, symmetry loss, grid mismatch
  Simulation,   // non-finite state during a Monte Carlo run
  Unsupported,  // operation not defined for the given input
  NoMatch,      // trajectory export could not find a matching path
  Io,
};

std::string_view category_name(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorCategory::Parameter, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& what) : Error(ErrorCategory::Simulation, what) {}
};

class UnsupportedInput : public Error {
 public:
  explicit UnsupportedInput(const std::string& what) : Error(ErrorCategory::Unsupported, what) {}
};

class NoMatchingPath : public Error {
 public:
  explicit NoMatchingPath(const std::string& what) : Error(ErrorCategory::NoMatch, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

}  // namespace interbank
