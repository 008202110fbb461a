#pragma once

#include <stdexcept>
#include <string>

namespace bcross {

/// Argument outside the mathematical domain of an operation (bad rho, t past
/// the horizon, a barrier parameter constraint that does not hold, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A hypothesis that must be checked numerically before a formula may be used
/// (for example the images condition) failed.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record (bad JSON, unknown schema version, missing field).
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bcross
