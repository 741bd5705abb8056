#pragma once

#include <stdexcept>
#include <string>

namespace manet {

/// Violated precondition on a caller-supplied argument.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of a formula (negative distance, m < 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A computed quantity left its admissible range by more than round-off.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling could not place a mobile within the retry budget.
class InfeasibleDensityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration key or value. The message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace manet
