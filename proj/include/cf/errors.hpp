#pragma once

#include <stdexcept>
#include <string>

namespace cf {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration, bad usage, unreadable/malformed input files. CLI exit code 2.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed corpus content (carries a line number in the message). CLI exit code 2.
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// A caller violated an operation's precondition. CLI exit code 1.
struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

// Non-finite loss or gradient during training; names the offending location.
struct DivergenceError : Error {
    explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace cf
