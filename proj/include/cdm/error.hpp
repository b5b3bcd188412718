#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cdm {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (empty input, bad index, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Estimator failures.
class ZeroEntryError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class NonPositiveAlphaError : public Error {
 public:
  using Error::Error;
};

class InsufficientRowsError : public Error {
 public:
  using Error::Error;
};

// Input text could not be read as a draw file.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a game or configuration rule. A line of
// zero means the violation is not tied to an input line.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what), line_(0) {}
  ValidationError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The staking simulator could not find a player count below its cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace cdm
