#pragma once

#include <stdexcept>

namespace triform {

/// Requested evaluation is singular at the given point (e.g. too close to the
/// collocated configuration for a line-set normal to exist).
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A documented precondition of the operation was violated by the caller.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical solver failed to converge on a bracketed root.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A verification check that is expected to hold for this system failed.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Function evaluated at a pole of its domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace triform
