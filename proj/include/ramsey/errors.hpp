#ifndef RAMSEY_ERRORS_HPP
#define RAMSEY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ramsey {

// Invalid configuration or parameter set (CLI exit code 2).
struct config_error : std::invalid_argument {
    explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Work would exceed a resource cap (CLI exit code 3).
struct resource_limit_error : std::runtime_error {
    explicit resource_limit_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: divergent quadrature, factorization breakdown, inversion
// out of range (CLI exit code 4).
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ramsey

#endif
