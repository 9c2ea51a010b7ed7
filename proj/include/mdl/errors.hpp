#pragma once

#include <stdexcept>
#include <string>

namespace mdl {

/// Argument outside the mathematical domain of an operation (e.g. gamma_encode(0)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A program or sample needs instance bits beyond the observable capacity.
class CapacityError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed program code.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The same instance carries both labels; no predictor can interpolate.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seed search exhausted its length budget while building an interpolator.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mdl
