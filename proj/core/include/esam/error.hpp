#pragma once

#include <stdexcept>
#include <string>

namespace esam {

// Base of every error thrown by the library. The CLI maps the concrete
// type onto its exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

// Input violates a documented schema, range or precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

// An internal invariant of the simulator did not hold. Always a bug.
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace esam
