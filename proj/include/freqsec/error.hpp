#pragma once

#include <stdexcept>
#include <string>

namespace freqsec {

/// File cannot be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (syntax, missing keys, wrong types).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No commitment/dispatch satisfies demand and reserve.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, int hour = -1)
        : std::runtime_error(what), hour_(hour) {}
    int hour() const noexcept { return hour_; }

private:
    int hour_;
};

/// Instance exceeds what exhaustive enumeration can handle.
class TooLargeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace freqsec
