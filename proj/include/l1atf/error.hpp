#pragma once

#include <stdexcept>
#include <string>

namespace l1atf {

// Invalid arguments or invocation (exit code 2 at the CLI).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unusable input data: malformed files, non-finite series (exit code 3).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values during optimization, oracle non-convergence (exit code 4).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No admissible fit left to choose from.
class SelectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace l1atf
