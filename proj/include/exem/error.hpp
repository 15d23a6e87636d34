#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Feature id outside the declared vocabulary.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite quantity or degenerate numerical input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A score or statistic whose formula is undefined for the given arguments.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace exem
