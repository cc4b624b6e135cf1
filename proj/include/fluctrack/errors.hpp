#pragma once

#include <stdexcept>
#include <string>

namespace fluctrack {

/// Argument outside the domain of an operation (unknown label, censored amplitude, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A computation that is mathematically defined failed numerically
/// (singular innovation covariance, degenerate samples, non-converging inversion).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fluctrack
