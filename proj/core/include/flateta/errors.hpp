#pragma once

#include <stdexcept>
#include <string>

namespace flateta {

/// Operands disagree in torus dimension or bundle rank.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold
/// (wrong form degree, non-constant input where a constant is required, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical resource or accuracy guard tripped: truncation too large,
/// eigenvalue tracking could not be resolved, endpoint on the imaginary axis.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario or serialized input does not match its schema.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace flateta
