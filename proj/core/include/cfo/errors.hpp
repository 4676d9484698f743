#pragma once

#include <stdexcept>
#include <string>

namespace cfo {

/// Bad caller input: wrong sizes, out-of-domain parameters, incompatible files.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A query outside the domain an object was built on (e.g. t outside [0,1]).
class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Non-finite values, singular systems, diverging computations.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularSystem : public NumericError {
public:
    using NumericError::NumericError;
};

/// A metric whose normalisation is zero.
class UndefinedMetric : public NumericError {
public:
    using NumericError::NumericError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cfo
