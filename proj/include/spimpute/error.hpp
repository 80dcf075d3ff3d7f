#pragma once

#include <stdexcept>
#include <string>

namespace spimpute {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (files, ids, out-of-range values).
class InputError : public Error {
public:
    using Error::Error;
};

/// A configuration that cannot be run, e.g. a disconnected a-priori graph.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Generalized eigenproblem called with a zero degree entry.
class DegenerateDegreeError : public Error {
public:
    using Error::Error;
};

/// Sensor id not present where it was expected.
class LookupError : public Error {
public:
    using Error::Error;
};

class NoNeighborsError : public Error {
public:
    using Error::Error;
};

/// A statistic over an empty set (RMSE with no scored rows, best constant with no reveals).
class UndefinedError : public Error {
public:
    using Error::Error;
};

}  // namespace spimpute
