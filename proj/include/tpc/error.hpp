#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tpc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(line == 0 ? reason : "line " + std::to_string(line) + ": " + reason), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A query or construction violated an operation precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed the exhaustive-search bound.
class BoundExceeded : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an event of probability zero.
class ZeroProbabilityEvidence : public Error {
 public:
  using Error::Error;
};

class UnassignedVariable : public Error {
 public:
  explicit UnassignedVariable(const std::string& name)
      : Error("unassigned variable '" + name + "'"), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

}  // namespace tpc
