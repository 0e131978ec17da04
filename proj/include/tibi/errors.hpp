#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tibi {

// Base for every error raised by the library. CLI maps these to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A region lies outside its chromosome.
class BoundsError : public Error {
public:
    using Error::Error;
};

// A region names a chromosome that is not in the genome.
class ReferenceError : public Error {
public:
    using Error::Error;
};

// An argument lies outside the operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Bin lookup for a value outside the axis range.
class RangeError : public Error {
public:
    using Error::Error;
};

// Missing tracks, unreadable files, bad manifests.
class ConfigError : public Error {
public:
    using Error::Error;
};

// An internal invariant failed; indicates a bug, not bad input.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace tibi
