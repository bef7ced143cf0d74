#pragma once

#include <stdexcept>
#include <string>

namespace sjlt {

/// Raised when epsilon/delta/d fall outside the range the constructions accept.
class ParameterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Vector or matrix dimensions that do not agree with a transform.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A construction's precondition failed (e.g. the block-Hadamard dimension bound).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Two sketches built from different projections were combined.
class IdentityMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sjlt
