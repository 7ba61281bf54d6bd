#pragma once

#include <stdexcept>
#include <string>

namespace reds {

/// Base of every error thrown by the library. `exit_code()` is what the CLI returns.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

/// Malformed or inconsistent input data (bad CSV, dimension mismatch, non-finite values).
class InputError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Invalid run configuration (inverted ranges, empty resolution list, M > n).
class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// The coverage target cannot be reached on the training set.
class CalibrationError : public Error {
public:
    CalibrationError(const std::string& what, double max_coverage)
        : Error(what), max_coverage_(max_coverage) {}
    int exit_code() const noexcept override { return 4; }
    double max_coverage() const noexcept { return max_coverage_; }

private:
    double max_coverage_;
};

/// Factorization failures, rank-deficient designs, too few valid ensemble members.
class NumericalError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 5; }
};

}  // namespace reds
