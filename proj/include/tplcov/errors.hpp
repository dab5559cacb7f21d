#pragma once

#include <stdexcept>
#include <string>

namespace tplcov {

// Malformed or non-finite input data (CSV parse failures, NaN entries).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mathematical precondition violated by the values themselves, e.g. a
// non-positive-definite 2x2 block of the sample covariance.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Singular systems, failed PD repair, non-convergence surfaced as an error.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tplcov
