#ifndef GCDNET_ERRORS_HPP
#define GCDNET_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gcdnet {

/// Root of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A caller broke an operation's precondition (e.g. backward on a non-scalar).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Invalid hyperparameters, options or experiment setup.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Graph or model content that parsed but is inconsistent.
class ValidationError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed text input; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace gcdnet

#endif // GCDNET_ERRORS_HPP
