#pragma once

#include <stdexcept>
#include <string>

namespace tocc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: wrong shapes, out-of-range parameters, malformed files.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The data cannot support the requested fit (constant data, singular
/// covariance, undersized clusters, every mixture candidate degenerate).
class DegenerateData : public Error {
public:
    using Error::Error;
};

} // namespace tocc
