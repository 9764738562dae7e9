#pragma once

#include <stdexcept>
#include <string>

namespace mugame {

// Malformed textual input. Carries a position when one is known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, int line, int column)
        : std::runtime_error(message + " at line " + std::to_string(line) +
                             ", column " + std::to_string(column)),
          line_(line), column_(column) {}
    explicit ParseError(const std::string& message)
        : std::runtime_error(message), line_(0), column_(0) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Structurally well-formed input that violates a semantic requirement
// (dangling edge, unbound variable, wrong parity, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iteration limit was hit before a fixed point was reached.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computed object grew past a configured resource cap.
class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Internal consistency check failed; indicates a bug, not bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace mugame
