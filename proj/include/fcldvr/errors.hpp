#pragma once

#include <stdexcept>
#include <string>

namespace fcldvr {

/// Invalid parameter set or violated precondition; message names the
/// offending quantity and the rule it broke.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed scenario / trace / parameter text. Carries the 1-based line
/// number when the failure is attributable to one.
class ParseError : public ValidationError {
public:
    explicit ParseError(const std::string& msg) : ValidationError(msg), line_(0) {}
    ParseError(const std::string& msg, int line)
        : ValidationError("line " + std::to_string(line) + ": " + msg), line_(line) {}

    /// 1-based line number, or 0 when not tied to a specific line.
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

/// Raised when a computation produces a non-finite value (integration
/// blow-up, degenerate inputs escaping validation).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fcldvr
