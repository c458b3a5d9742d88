#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgn {

// Base for every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or hyperparameter combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad input data (labels out of range, malformed records).
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed skeleton text, with the offending line.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Unsupported or mismatching schema version in a persisted file.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// A record that cannot be assigned under the chosen evaluation protocol.
class ProtocolError : public DataError {
 public:
  using DataError::DataError;
};

// Non-finite values produced during a forward pass or training step.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgn
