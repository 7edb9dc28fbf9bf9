#pragma once

#include <stdexcept>
#include <string>

namespace etsmc {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input data or parameter values (bad matrices, out-of-range gains,
/// malformed configuration fields). Maps to CLI exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Configuration file could not be opened.
class ConfigFileError : public Error {
public:
    using Error::Error;
};

/// Configuration file exists but is not syntactically valid.
class ConfigParseError : public Error {
public:
    using Error::Error;
};

/// Matrix is singular to working precision.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// A diagnostic was asked to operate on a trace too short to be meaningful.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Numeric failure at runtime (non-finite state, iteration that did not
/// converge). Maps to CLI exit code 2. `time` and `agent` identify where the
/// failure happened when that is known; agent -1 means "not agent-specific".
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what, double time = -1.0, int agent = -1)
        : Error(what), time_(time), agent_(agent) {}

    double time() const noexcept { return time_; }
    int agent() const noexcept { return agent_; }

private:
    double time_;
    int agent_;
};

}  // namespace etsmc
