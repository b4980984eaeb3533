#pragma once

#include <stdexcept>
#include <string>

namespace bvwave {

// Bad user input: out-of-range levels, malformed config, invalid flag combinations.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The stability gate refused a solve request.
struct GateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numeric routine failed: factorization breakdown, non-finite values, size guards.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bvwave
