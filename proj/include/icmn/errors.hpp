// Error types shared across the library. Parameter problems use
// std::invalid_argument; the types below cover the remaining cases callers
// are expected to branch on.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icmn {

// Offered load at or above capacity: the expected delay is unbounded, so
// delay formulas refuse to produce a number.
class instability_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed input text (schedule/trace/config/movement files). Carries the
// 1-based line number of the offending line.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& source, std::size_t line, const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Filesystem-level failure (unreadable input, unwritable output).
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace icmn
