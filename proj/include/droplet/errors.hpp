#pragma once
#include <stdexcept>
#include <string>

namespace droplet {

// Thrown for malformed inputs: bad grids, unordered times, unknown config
// keys, parameter combinations the solvers refuse. Maps to exit code 2.
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when a computation cannot be completed to tolerance (quadrature
// stall, non-positive heat field, exponent overflow). Maps to exit code 3.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace droplet
