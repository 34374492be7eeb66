#ifndef EGMRSI_ERRORS_HPP
#define EGMRSI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace egmrsi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A linear-domain value left the representable floating range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// A caller broke an operation's precondition (empty window, bad dimension, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A bounded quantity was supplied outside its admissible interval.
class BoundsViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Run aborted; carries the step index at which a module failed.
class RunError : public Error {
public:
    RunError(const std::string& what, long step)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

    long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace egmrsi

#endif
