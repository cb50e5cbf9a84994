#pragma once

#include <stdexcept>
#include <string>

namespace fibtrans {

// Raised when a numerical routine cannot meet its contract (missed zeros,
// unresolved contours, eigensolver breakdown). The CLI maps it to exit code 3.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// Raised for out-of-envelope parameters. The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace fibtrans
