#pragma once

#include <stdexcept>
#include <string>

namespace dpower {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma evaluated at (or within tolerance of) a non-positive integer.
struct PoleError : Error {
    using Error::Error;
};

// A Gamma or hypergeometric parameter diverged inside a composite formula.
struct ParameterPole : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    using Error::Error;
};

// x at 0 or 1, where the fourth roots lose their meaning.
struct DegenerateX : Error {
    using Error::Error;
};

struct DegenerateDenominator : Error {
    using Error::Error;
};

struct NotInOrbit : Error {
    using Error::Error;
};

struct ResampleExhausted : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Raised when an invariant that holds by construction is found broken.
struct ConstraintViolation : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace dpower
