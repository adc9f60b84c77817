#pragma once

#include <stdexcept>
#include <string>

namespace nemscat {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input outside the domain of a physical formula (non-positive mass, zero detuning, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numerical gate refused to continue: step-doubling check, Fock cutoff leakage,
/// adaptive step underflow.
class NumericalGateError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace nemscat
