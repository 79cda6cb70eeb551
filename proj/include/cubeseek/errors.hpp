#pragma once

#include <stdexcept>
#include <string>

namespace cubeseek {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OverflowError : std::overflow_error {
    using std::overflow_error::overflow_error;
};

/// Input data is structurally fine but unusable (e.g. a non-positive running time).
struct InvalidData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Data is valid but carries no information for the requested estimate (zero spread).
struct DegenerateData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A numerical procedure failed to reach its tolerance; carries the best value it achieved.
struct NumericError : std::runtime_error {
    NumericError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace cubeseek
