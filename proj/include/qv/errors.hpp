#pragma once

#include <stdexcept>
#include <string>

namespace qv {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parameter set fails its natural-boundary condition.
class ModelRejected : public InvalidArgument {
public:
    ModelRejected(std::string condition, const std::string& msg)
        : InvalidArgument(msg), condition_(std::move(condition)) {}
    const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

// No contour exists: model and payoff strips do not meet.
class EmptyStripError : public Error {
public:
    using Error::Error;
};

// Contour argument outside the strip of a transform.
class StripViolation : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class SingularPointError : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class UnderflowError : public Error {
public:
    using Error::Error;
};

// Iteration/quadrature budget exhausted. Carries the best estimate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double estimate = 0.0, double error = 0.0)
        : Error(msg), estimate_(estimate), error_(error) {}
    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

} // namespace qv
