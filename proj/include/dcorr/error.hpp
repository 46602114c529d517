#pragma once

#include <stdexcept>
#include <string>

namespace dcorr {

/// Base for all errors raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data: non-finite values, unparsable cells, missing values
/// under a strict policy, ragged rows.
class DataError : public Error {
public:
    using Error::Error;
};

/// Mismatched sample sizes or unsupported dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Pearson correlation of a constant variable.
class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace dcorr
