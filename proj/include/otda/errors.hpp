#pragma once

#include <stdexcept>
#include <string>

namespace otda {

// Thrown when a solver fails numerically (underflow, non-convergence,
// pivot-limit). Input validation failures use std::invalid_argument and
// file problems use std::runtime_error.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace otda
