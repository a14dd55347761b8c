#pragma once

#include <stdexcept>
#include <string>

namespace exmap {

// Base class for all library errors. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad parameters, malformed input files, inconsistent configuration.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// A focal design that cannot support the test (empty candidate pool,
// |S| < kappa, no adequate biclique).
class DegenerateDesignError : public Error {
public:
    explicit DegenerateDesignError(const std::string& msg) : Error(msg) {}
};

// Conditional rejection sampling exhausted its attempt budget.
class SamplingError : public Error {
public:
    SamplingError(const std::string& msg, long attempts_used)
        : Error(msg), attempts(attempts_used) {}
    long attempts;
};

}  // namespace exmap
