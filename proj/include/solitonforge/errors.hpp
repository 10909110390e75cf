#pragma once

#include <stdexcept>
#include <string>

namespace solitonforge {

// Base class for all library errors. Subclasses distinguish the failure
// modes the CLI maps onto exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the valid interval of a sampled object.
class RangeError : public Error {
public:
    using Error::Error;
};

// Function evaluated outside its mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Invalid or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A numerical routine could not reach its requested accuracy.
class AccuracyError : public Error {
public:
    using Error::Error;
};

// Malformed input file.
class ParseError : public Error {
public:
    using Error::Error;
};

// API misuse (missing required inputs and the like).
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace solitonforge
