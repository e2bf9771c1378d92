#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bilap {

/// Base class for all errors thrown by this library. `kind()` carries a
/// stable machine-readable tag (e.g. "DuplicateEdge") next to the human
/// message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Invalid input: bad graph, malformed condition, schema violation.
/// CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: ambiguous spectral gap, solver breakdown, failed
/// certification. CLI maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace bilap
