#pragma once

#include <stdexcept>
#include <string>

namespace murmur {

/// Base class for every error raised by the library.
///
/// Errors fall into two families that the CLI maps onto exit codes:
/// validation problems with the inputs (exit 2) and numerical failures
/// (exit 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual bool numerical() const noexcept { return false; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// a_p was requested at a prime of bad reduction.
class BadReduction : public Error {
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

class ValidationError : public Error {
 public:
  using Error::Error;
};

class EmptyClass : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
  bool numerical() const noexcept override { return true; }
};

/// A truncation could not meet the requested accuracy.
class ToleranceError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace murmur
