#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathbench {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration or workload document.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed document whose content violates a configuration invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A caller broke an operation precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

/// No schema-graph path of the requested length reaches the target.
class NoPathError : public Error {
public:
    using Error::Error;
};

/// A query could not be instantiated under the requested constraints.
class InstantiationError : public Error {
public:
    using Error::Error;
};

/// Too few usable data points for a regression.
class InsufficientData : public Error {
public:
    using Error::Error;
};

class UnsupportedFeature : public Error {
public:
    using Error::Error;
};

class IOError : public Error {
public:
    using Error::Error;
};

}  // namespace pathbench
