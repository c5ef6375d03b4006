#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ampda {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid argument to an operation (bad sizes, out-of-range parameters).
struct ArgumentError : Error {
  using Error::Error;
};

/// A point violates a domain requirement (outside the ratio domain, zero
/// denominator, box violation where membership is a precondition).
struct DomainError : Error {
  using Error::Error;
};

/// An oracle produced a non-finite value; the message names the oracle.
struct EvalError : Error {
  using Error::Error;
};

/// Text input could not be parsed; carries the 1-based line number.
struct ParseError : Error {
  std::size_t line;
  ParseError(const std::string& msg, std::size_t line_no)
      : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

/// Filesystem failure (open/read/write).
struct IoError : Error {
  using Error::Error;
};

/// Initial-point construction cannot proceed (hypotheses violated).
struct ConstructionError : Error {
  using Error::Error;
};

}  // namespace ampda
