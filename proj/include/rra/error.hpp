#pragma once

#include <stdexcept>
#include <string>

namespace rra {

/// Raised for malformed input data (weight files, qrels, runs, priors).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a numeric invariant of the transform cannot be maintained.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rra
