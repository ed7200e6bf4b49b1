#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kta {

// Bad call arguments: out-of-range values, shape mismatches, violated
// preconditions.
class argument_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input files: wrong magic, inconsistent headers, bad records.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable or truncated files.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid experiment configuration or layer wiring.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values during optimization. Carries the cost history
// accumulated before the failure.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what, std::vector<double> costs = {})
        : std::runtime_error(what), costs_so_far(std::move(costs)) {}

    std::vector<double> costs_so_far;
};

}  // namespace kta
