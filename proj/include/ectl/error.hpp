#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ectl {

/// Malformed input: unknown identifiers, kind violations, syntax errors.
/// Parsers fill in the 1-based line/column when they know it.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(format(what, line, column)), message_(what), line_(line), column_(column) {}

    /// The text without the position prefix.
    const std::string& message() const noexcept { return message_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        std::string out = std::to_string(line);
        if (column != 0) out += ":" + std::to_string(column);
        return out + ": " + what;
    }

    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// A release operator annotated with a nondeterministic, non-visibly pushdown
/// automaton. Carries the printed offending subformula.
class UndecidableError : public std::runtime_error {
public:
    explicit UndecidableError(std::string subformula, const std::string& why)
        : std::runtime_error("undecidable combination in " + subformula + ": " + why),
          subformula_(std::move(subformula)) {}

    const std::string& subformula() const noexcept { return subformula_; }

private:
    std::string subformula_;
};

/// A determinization produced more states than the configured cap.
class CapExceededError : public std::runtime_error {
public:
    CapExceededError(const std::string& automaton, std::size_t cap)
        : std::runtime_error("determinization of '" + automaton + "' exceeds the state cap of " +
                             std::to_string(cap)),
          cap_(cap) {}

    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

} // namespace ectl
