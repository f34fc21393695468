#pragma once

#include <stdexcept>
#include <string>

namespace qgap {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
// usage/parse -> 2, resource -> 3, everything else that aborts a run -> 1.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape mismatches, index overflow, dimension caps.
struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// A precondition of a documented operation was violated by the caller.
struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

// Work refused because it would exceed a configured budget.
struct ResourceError : Error {
    explicit ResourceError(const std::string& msg) : Error(msg) {}
};

// Malformed input documents (operator files, graphs, SDP dumps).
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Structurally valid input that the requested operation cannot handle
// (e.g. a relaxation level too small to host a term).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

}  // namespace qgap
