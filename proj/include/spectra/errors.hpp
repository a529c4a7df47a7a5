#pragma once

#include <stdexcept>
#include <string>

namespace spectra {

/// Input outside the mathematical domain of an operation (negative x on a
/// half-line potential, k <= 0, Im z <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or inconsistent configuration (overlapping bumps, short fit
/// windows, non-monotone h, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// ODE integration failure; carries the abscissa where it happened.
class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double where)
        : NumericalError(what + " at x=" + std::to_string(where)), location_(where) {}

    double location() const noexcept { return location_; }

private:
    double location_;
};

}  // namespace spectra
