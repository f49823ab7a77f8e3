#pragma once

#include <stdexcept>
#include <string>

namespace semijulia {

// Base for every error raised by the library. Callers that only care about
// "something in the run failed" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The simultaneous root iteration did not reach its residual tolerance.
class SolverDivergence : public Error {
 public:
  using Error::Error;
};

// The start point lies on a candidate exceptional point, so its backward
// orbit would stay trapped in a finite set.
class ExceptionalStartPoint : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class EmptyTail : public Error {
 public:
  using Error::Error;
};

class ViewportMismatch : public Error {
 public:
  using Error::Error;
};

class EmptySet : public Error {
 public:
  using Error::Error;
};

// Malformed run configuration. `field` names the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace semijulia
