#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lgqs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated mathematical precondition (singular or indefinite matrix, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Unraveling matrix with M M^dagger not diagonal or efficiencies outside [0,1].
class UnravelingError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration or other numerical procedure that did not succeed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration. `field()` is the dotted path of the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace lgqs
