#pragma once

#include <stdexcept>
#include <string>

namespace policyshare {

// Argument outside an operation's mathematical domain (non-finite reward,
// non-positive temperature, mismatched table shapes, ...).
class InputDomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid or infeasible run configuration. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failure while a simulation is running. Maps to CLI exit code 2.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PhysicsError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

}  // namespace policyshare
