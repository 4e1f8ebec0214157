#pragma once

#include <stdexcept>
#include <string>

namespace implreg {

// Raised for invalid inputs (bad hyperparameters, malformed configs, ...).
using ValidationError = std::invalid_argument;

// Raised when a run would exceed a resource budget or a stability limit.
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace implreg
