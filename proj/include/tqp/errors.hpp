#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tqp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(message), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Structurally invalid input: rank violations, unknown symbols, nondeterminism, ...
class ValidationError : public Error {
public:
    using Error::Error;
};

class AlphabetMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// The transducer has no rule for some reached (state, symbol) pair.
class NotInDomain : public Error {
public:
    using Error::Error;
};

/// A data tree with a valueless node was given where a proper tree is required.
class ImproperInput : public Error {
public:
    using Error::Error;
};

/// A configured cap (runs, macrostates, enumerated trees) was hit.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

} // namespace tqp
