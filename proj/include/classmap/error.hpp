#pragma once

#include <stdexcept>
#include <string>

namespace classmap {

/// Malformed or inconsistent input: bad CSV cells, non-stochastic rows,
/// unknown labels, schema mismatches.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The problem is well-formed but outside what the method supports (G < 2).
class UnsupportedError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Numerically degenerate data: zero median/MAD distances, singular
/// covariances that no ridge repairs, undefined dissimilarities.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace classmap
