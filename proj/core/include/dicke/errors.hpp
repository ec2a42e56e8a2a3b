#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Eigensolver or quadrature failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fock-space truncation too small for the requested state.
class CutoffError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No field point reaches the requested total energy.
class EnergyInfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive integration could not proceed (step underflow, energy drift).
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dicke
