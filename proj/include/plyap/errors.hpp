#pragma once

#include <stdexcept>
#include <string>

namespace plyap {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The admissible class for the requested ladder is empty (e.g. no positive part of the weight).
class NoEigenvalue : public DomainError {
public:
    using DomainError::DomainError;
};

/// A formula is only defined for the constant coefficient a = 1.
class UnsupportedCoefficient : public DomainError {
public:
    using DomainError::DomainError;
};

/// A construction would exceed a configured size cap.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, std::size_t required)
        : Error(what + " (required cap: " + std::to_string(required) + ")"), required_(required) {}
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t required_;
};

/// The adaptive integrator could not advance (step-size underflow).
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double reached_x)
        : Error(what + " (reached x = " + std::to_string(reached_x) + ")"), reached_x_(reached_x) {}
    double reached_x() const noexcept { return reached_x_; }

private:
    double reached_x_;
};

/// Eigenvalue search failed to bracket or converge.
class SearchError : public Error {
public:
    using Error::Error;
};

/// Rayleigh quotient denominator vanishes.
class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

/// A file could not be read or written, or its contents are not JSON.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace plyap
