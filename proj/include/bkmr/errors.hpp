#pragma once

#include <stdexcept>
#include <string>

namespace bkmr {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid caller input: bad dimensions, non-finite data, rank deficiency,
// malformed files. Maps to CLI exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

// Prior elicitation cannot produce a usable informative prior
// (e.g. zero residual variance); callers should fall back to flat priors.
class ElicitationError : public InputError {
public:
    using InputError::InputError;
};

// An internal invariant failed. Not expected to be reachable via public
// entry points with valid input.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace bkmr
