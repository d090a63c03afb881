#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smart {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tree-shape violation, e.g. an unknown parent id.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Not enough distinct profiling points to determine a fit.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

/// Instance too large for exhaustive enumeration.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace smart
