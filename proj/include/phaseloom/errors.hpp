#pragma once

#include <stdexcept>
#include <string>

namespace phaseloom {

// Library errors are thrown, never returned. Each class maps to one
// failure family so callers can catch what they can actually handle.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or length of a field does not match the operator / grid.
struct DimensionError : Error {
    using Error::Error;
};

// A parameter is outside its legal range (relaxation, mode index, ...).
struct ParameterError : Error {
    using Error::Error;
};

// Input values violate a domain requirement (negative intensity, ...).
struct DomainError : Error {
    using Error::Error;
};

// Iteration step norm exceeded the divergence guard.
struct DivergenceError : Error {
    using Error::Error;
};

// A mathematical assumption required by an analysis routine does not
// hold on this instance (e.g. zero entries in the reference field).
struct AssumptionError : Error {
    using Error::Error;
};

// Not enough usable data to form an estimate.
struct EstimationError : Error {
    using Error::Error;
};

// A least-squares basis is rank deficient on this grid.
struct ConditioningError : Error {
    using Error::Error;
};

// File I/O or format problems.
struct IoError : Error {
    using Error::Error;
};

}  // namespace phaseloom
