#pragma once

#include <stdexcept>
#include <string>

namespace boltnet {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int { ok = 0, validation = 1, divergence = 2, io = 3 };

/// Base of every error raised by the library. Each subclass knows the exit
/// code the CLI reports for it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::validation; }
};

/// Incompatible matrix/vector dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A cell or token that could not be parsed as the expected type.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Data that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Non-finite values during forward pass or training.
class NumericError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::divergence; }
};

/// File I/O failures and model files that fail schema checks.
class PersistenceError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::io; }
};

}  // namespace boltnet
