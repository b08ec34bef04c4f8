#pragma once

#include <stdexcept>
#include <string>

namespace condstein {

/// Base type for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid construction values (negative weights, bad normalization, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// Families cannot be placed on a common finite support.
struct MixedModeError : Error {
  using Error::Error;
};

/// Evaluation point outside an operator's or function's domain.
struct DomainError : Error {
  using Error::Error;
};

/// Test function violates a family's boundary convention.
struct BoundaryError : Error {
  using Error::Error;
};

/// y lies outside the model's essential range.
struct EssentialRangeError : Error {
  using Error::Error;
};

struct GridMismatchError : Error {
  using Error::Error;
};

struct SizeError : Error {
  using Error::Error;
};

struct FamilyError : Error {
  using Error::Error;
};

/// Adaptive integration failed to reach tolerance within its budget.
struct QuadratureError : Error {
  using Error::Error;
};

/// A numerically stable form still left representable range.
struct OverflowGuardError : Error {
  using Error::Error;
};

/// The joint law's y-marginal does not match the model's y-weights.
struct MarginalMismatchError : Error {
  using Error::Error;
};

/// Malformed model spec / samples / joint input.
struct SpecParseError : Error {
  using Error::Error;
};

/// An internal numerical self-check failed.
struct ToleranceBreachError : Error {
  using Error::Error;
};

}  // namespace condstein
