#pragma once

#include <stdexcept>

namespace unionclust {

/// Argument violates an operation's contract.
class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File cannot be opened or read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File contents do not match the expected format.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model-order estimation produced no usable estimate.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical routine failed to converge or produced invalid output.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace unionclust
