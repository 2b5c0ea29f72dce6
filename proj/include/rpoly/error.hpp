#pragma once

#include <stdexcept>
#include <string>

namespace rpoly {

// Failure categories surfaced through the C API as distinct error codes.
enum class ErrorKind {
    invalid_input,
    degenerate_input,
    data,
    config,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error(ErrorKind::invalid_input, what) {}
};

// Flat point set: fewer than d+1 points, or no full-dimensional simplex among them.
class DegenerateInput : public Error {
public:
    explicit DegenerateInput(const std::string& what) : Error(ErrorKind::degenerate_input, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace rpoly
