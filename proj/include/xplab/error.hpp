#pragma once

#include <stdexcept>
#include <string>

namespace xplab {

/// Quantity is undefined at the given input (ratio of the zero vector,
/// functional of a block with empty mass on its designated set, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Two operands live over different weighted spaces.
class SpaceMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A caller-side precondition failed. `which()` names it.
class PreconditionError : public std::invalid_argument {
public:
    PreconditionError(std::string which, const std::string& what)
        : std::invalid_argument(which + ": " + what), which_(std::move(which)) {}
    const std::string& which() const noexcept { return which_; }

private:
    std::string which_;
};

/// A constant system or a generator request has no solution.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string constraint, const std::string& what)
        : std::runtime_error(constraint + ": " + what), constraint_(std::move(constraint)) {}
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

/// Basis is linearly dependent or too ill-conditioned to project onto.
class SingularBasis : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace xplab
