#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hotlane {

/// A parameter set violated one of its documented invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed configuration text. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string key, const std::string& what)
        : std::runtime_error(what), line_(line), key_(std::move(key)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

enum class SolverErrorKind {
    BracketFailure,
    NoConvergence,
    InfeasibleClosure,
    GapNonPositive,
};

constexpr std::string_view to_string(SolverErrorKind kind) noexcept {
    switch (kind) {
        case SolverErrorKind::BracketFailure: return "BracketFailure";
        case SolverErrorKind::NoConvergence: return "NoConvergence";
        case SolverErrorKind::InfeasibleClosure: return "InfeasibleClosure";
        case SolverErrorKind::GapNonPositive: return "GapNonPositive";
    }
    return "Unknown";
}

class SolverError : public std::runtime_error {
public:
    SolverError(SolverErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    SolverErrorKind kind() const noexcept { return kind_; }

private:
    SolverErrorKind kind_;
};

}  // namespace hotlane
