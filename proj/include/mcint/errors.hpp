#pragma once

#include <stdexcept>
#include <string>

namespace mcint {

/// Base of every error the library raises. `kind()` is the stable tag used in
/// JSON error payloads.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

/// Bad arguments: division by zero, out-of-range parameters, points outside
/// a function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

/// A configured resource cap was hit (interval counts, expansion lengths,
/// enclosure refinement depth).
class BudgetError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "budget"; }
};

/// Malformed textual input (rationals, point-set specs, JSON documents).
class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse"; }
};

}  // namespace mcint
