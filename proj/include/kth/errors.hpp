// errors.hpp — error taxonomy shared by the library and the CLI exit codes.
#pragma once
#include <stdexcept>
#include <string>

namespace kth {

// Bad arguments / preconditions (CLI exit code 2).
struct config_error : std::invalid_argument {
    explicit config_error(const std::string& m) : std::invalid_argument(m) {}
};

// A state or numeric invariant failed mid-computation (CLI exit code 3).
struct invariant_error : std::runtime_error {
    explicit invariant_error(const std::string& m) : std::runtime_error(m) {}
};

// Allocation / capacity / file errors (CLI exit code 4).
struct io_error : std::runtime_error {
    explicit io_error(const std::string& m) : std::runtime_error(m) {}
};

} // namespace kth
