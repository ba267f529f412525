#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aai {

// Base for every error raised by the library. The CLI maps the subclasses
// onto exit codes (validation-type errors -> 1, everything else -> 2).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

}  // namespace aai
