#pragma once

#include <stdexcept>
#include <string>

namespace drsyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: malformed configuration, inconsistent shapes, bad ranges.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not produce a result (infeasible LP, blow-up guard, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace drsyn
