#pragma once

#include <stdexcept>
#include <string>

namespace solitonlab {

// Base of every error thrown by the library. Callers that only care about
// "something numerical went wrong" can catch this one.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numeric argument is outside its admissible range (alpha <= 0, p < 1, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Array length does not match the grid it is paired with.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Argument lies outside the domain of a special function or test.
class DomainError : public Error {
public:
    using Error::Error;
};

// Input makes a formula degenerate, e.g. an identically zero profile.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// An iteration produced NaN/Inf or left the real line.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// Linear algebra backend failure (eigensolver, factorization).
class NumericError : public Error {
public:
    using Error::Error;
};

// Continuation could not produce its first point.
class BranchError : public Error {
public:
    using Error::Error;
};

// Root search had no sign change to work with.
class BracketError : public Error {
public:
    using Error::Error;
};

// Too few samples for a finite difference.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Time integration hit a non-finite value; carries the time it happened.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace solitonlab
