#pragma once

#include <stdexcept>
#include <string>

namespace cusp {

/// Invalid parameters, malformed configuration or inadmissible input.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its tolerance (quadrature, factorization).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The limit simulation hit its truncation boundary too often.
class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace cusp
