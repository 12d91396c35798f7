#pragma once

#include <stdexcept>
#include <string>

namespace gsys {

/// Raised when an exponent would leave the representable range (|e| > 700 in
/// natural log scale). Silent infinities are never returned.
class OverflowError : public std::runtime_error {
public:
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a user-supplied kernel or incremental variance does not yield a
/// positive semidefinite covariance matrix on a grid.
class NotPsdError : public std::runtime_error {
public:
    explicit NotPsdError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on malformed configuration input (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the sampling window cannot meet the requested truncation error
/// under the hard padding cap.
class WindowCapError : public std::runtime_error {
public:
    explicit WindowCapError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when adaptive quadrature fails to converge to the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gsys
