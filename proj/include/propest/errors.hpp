#pragma once

#include <stdexcept>
#include <string>

namespace propest {

// Base of every error raised by the library. The CLI maps the subclasses
// onto its exit codes (see cli.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (theta >= 1 for Gamma, m < 2, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Interval arguments with a >= b.
class InvalidInterval : public DomainError {
public:
    using DomainError::DomainError;
};

// Numeric overflow guard tripped (exp argument > 700, series term too large).
class RangeError : public Error {
public:
    using Error::Error;
};

// Quadrature would need more panels than the configured cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

// Inconsistent or missing configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Operation not defined for the given family variant.
class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

// (family, null) combination for which no matching/discriminant pair exists.
class UnsupportedConstruction : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace propest
