#ifndef FRIED_ERRORS_HPP
#define FRIED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fried {

// Bad experiment/model configuration (dimension mismatches, invalid options).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unusable input data (CSV problems, empty groups, too few rows).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training produced a non-finite loss or gradient.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fried

#endif
