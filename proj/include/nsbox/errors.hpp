#pragma once

#include <stdexcept>
#include <string>

namespace nsbox {

// Invalid argument supplied to a library call (bad qubit index, arity
// mismatch, out-of-range parameter).
struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Requested object exceeds the configured size limits.
struct CapacityError : std::length_error {
    explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

// A documented precondition of the operation does not hold for the input.
struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// Not enough data to evaluate an estimator (e.g. empty counts cell).
struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical result violates an internal consistency bound; indicates a bug
// rather than bad user input.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace nsbox
