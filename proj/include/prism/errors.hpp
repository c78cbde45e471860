#pragma once

#include <stdexcept>
#include <string>

namespace prism {

// Base class for every error the pipeline raises deliberately.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyVideoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Raised when a backend call fails; retryable() tells the caller whether
// another attempt can succeed (network flake) or not (bad request).
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what, bool retryable = true)
      : Error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

class ValidationUnavailableError : public Error {
 public:
  using Error::Error;
};

class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

class InvalidRangeError : public Error {
 public:
  using Error::Error;
};

class InvalidPenaltyError : public Error {
 public:
  using Error::Error;
};

class OracleLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace prism
