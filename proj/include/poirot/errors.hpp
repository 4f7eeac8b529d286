#pragma once

#include <stdexcept>
#include <string>

namespace poirot {

/// Base class for all library errors. `category()` is stable and
/// machine-parseable; the CLI prints it on failure.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}
    const std::string& category() const { return category_; }

private:
    std::string category_;
};

class SizeError : public Error {
public:
    explicit SizeError(const std::string& m) : Error("size", m) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& m) : Error("shape", m) {}
};

class EmptyError : public Error {
public:
    explicit EmptyError(const std::string& m) : Error("empty", m) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& m) : Error("config", m) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& m) : Error("parse", m) {}
    ParseError(const std::string& file, std::size_t line, const std::string& m)
        : Error("parse", file + ":" + std::to_string(line) + ": " + m) {}
};

class StateError : public Error {
public:
    explicit StateError(const std::string& m) : Error("state", m) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& m) : Error("numeric", m) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error("io", m) {}
};

} // namespace poirot
