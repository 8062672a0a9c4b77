#ifndef ADVFLOW_ERRORS_HPP
#define ADVFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace advflow {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad covariance, weights that do not sum to one, bad JSON...
class ConfigError : public Error {
public:
    using Error::Error;
};

// A point or model of the wrong dimension was passed to an operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

// The model has no usable decision structure (e.g. rho0 == rho1 with w0 == w1).
class DegenerateModelError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

// An evolution law hit a vanishing denominator. Carries the offending value.
class DegeneracyError : public Error {
public:
    DegeneracyError(const std::string& what, double denominator)
        : Error(what), denominator_(denominator) {}

    double denominator() const noexcept { return denominator_; }

private:
    double denominator_;
};

class EvolutionError : public Error {
public:
    using Error::Error;
};

class CertificateError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

}  // namespace advflow

#endif  // ADVFLOW_ERRORS_HPP
