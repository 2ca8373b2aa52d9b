#pragma once

#include <stdexcept>
#include <string>

namespace udm {

// Thrown when a distribution violates its structural requirements
// (non-monotone CDF, nonpositive density, non-finite values).
struct invalid_distribution : std::runtime_error {
    explicit invalid_distribution(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iterative routine fails to converge or a bracket is lost.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on malformed run configuration (unknown field, bad type, missing key).
struct schema_error : std::runtime_error {
    explicit schema_error(const std::string& what) : std::runtime_error(what) {}
};

// Process exit codes used by the CLI.
enum exit_code : int {
    exit_ok = 0,
    exit_schema = 2,
    exit_numerical = 3,
    exit_internal = 4,
};

} // namespace udm
