#pragma once

#include <stdexcept>
#include <string>

namespace dualmean {

// Invalid configuration or input data. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A formula hit a numerical singularity (vanishing denominator, flat
// objective, non-finite result). CLI exit code 3.
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Too many Monte Carlo replications failed. CLI exit code 4.
class McFailureError : public std::runtime_error {
public:
    explicit McFailureError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dualmean
