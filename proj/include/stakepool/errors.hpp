#pragma once

#include <stdexcept>
#include <string>

namespace stakepool {

// Malformed or invalid input (bad scenario, unknown id, broken invariant).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input is well formed but outside the domain where a result is defined.
class PremiseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Instance larger than a configured search or discretization budget.
class CapacityError : public PremiseError {
public:
    using PremiseError::PremiseError;
};

}  // namespace stakepool
