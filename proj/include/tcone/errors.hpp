#pragma once

#include <stdexcept>
#include <string>

namespace tcone {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error { using Error::Error; };

/// The requested accuracy cannot be met in binary64.
class ToleranceError : public Error { using Error::Error; };

/// An iteration (root refinement, CG, bisection) ran out of budget.
class ConvergenceError : public Error { using Error::Error; };

/// The supplied cone angle does not satisfy the transmission equation.
class NotCriticalError : public Error { using Error::Error; };

/// A quantity that must be positive came out non-positive.
class SignError : public Error { using Error::Error; };

/// A derived constant violated an invariant of its construction.
class InvariantError : public Error { using Error::Error; };

/// The configuration does not meet the hypothesis of a check.
class ConfigError : public Error { using Error::Error; };

/// Data carries no information (e.g. identically zero energies).
class DegenerateError : public Error { using Error::Error; };

/// A grid whose assembled system is singular or malformed.
class SingularityError : public Error { using Error::Error; };

/// A test vector field is not compactly supported away from the boundary.
class SupportError : public Error { using Error::Error; };

}  // namespace tcone
