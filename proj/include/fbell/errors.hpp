#pragma once

#include <stdexcept>
#include <string>

namespace fbell {

// Base of every error raised by the library. `exit_code()` is what the CLI
// returns when the exception escapes a command.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 4; }
};

// A caller broke an operation's precondition (negative power, unnormalized
// state, invalid density matrix, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Request outside the physical model (bin index or sideband order beyond
// the truncated neighbourhood).
class OutOfModel : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// The physics produced nothing usable, e.g. an all-zero two-photon state.
class DegenerateState : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

class NumericalFailure : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

// Malformed configuration or input file. `where` is a field path or a
// "line N" locator.
class InputError : public Error {
public:
    InputError(const std::string& where, const std::string& what)
        : Error(where + ": " + what), where_(where) {}
    const std::string& where() const noexcept { return where_; }
    int exit_code() const noexcept override { return 2; }

private:
    std::string where_;
};

}  // namespace fbell
