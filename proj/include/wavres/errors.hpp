#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wavres {

// Base class for all toolkit errors. Subclasses map onto CLI exit codes:
// usage/parameter problems -> 1, data/format problems -> 2, divergence -> 3.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Malformed file content; carries the byte offset where parsing failed.
struct FormatError : Error {
    std::uint64_t byte_offset;
    FormatError(const std::string& msg, std::uint64_t offset)
        : Error(msg + " (byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct StateError : Error {
    explicit StateError(const std::string& msg) : Error(msg) {}
};

// Non-finite values appeared in an iterative solve; carries the iteration.
struct DivergenceError : Error {
    long iteration;
    DivergenceError(const std::string& msg, long iter)
        : Error(msg + " (iteration " + std::to_string(iter) + ")"),
          iteration(iter) {}
};

}  // namespace wavres
