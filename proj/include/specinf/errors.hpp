#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specinf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a configured size cap (oracle states, DP buckets).
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  enum class Kind { malformed, non_binary, arity, nonpositive_entry };

  ParseError(Kind kind, std::size_t token, const std::string& what)
      : Error(what + " (token " + std::to_string(token) + ")"), kind_(kind), token_(token) {}

  Kind kind() const noexcept { return kind_; }
  /// Zero-based index of the offending token in the input stream.
  std::size_t token() const noexcept { return token_; }

 private:
  Kind kind_;
  std::size_t token_;
};

}  // namespace specinf
