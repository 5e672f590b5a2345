#pragma once

#include <stdexcept>
#include <string>

namespace pstyle {

// Base of every error raised by the library. The CLI maps the subclasses to
// process exit codes (config 2, data 3, degenerate statistics 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or incomplete configuration, bad arguments, unknown selector names.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that cannot be used: malformed files, shape mismatches, empty inputs.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed document text; carries the 1-based line and column of the fault.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : DataError(what + " (line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed document that violates the declared schema (unknown role etc).
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// A computation with no meaningful answer, e.g. a training fold holding a single class.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace pstyle
