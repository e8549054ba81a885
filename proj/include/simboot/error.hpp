#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simboot {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A kernel center has (numerically) no data inside its support.
class DegenerateWeights : public Error {
public:
    using Error::Error;
};

/// The (bootstrap) curvature of a quadratic family is not positive definite.
class NonPositiveCurvature : public Error {
public:
    using Error::Error;
};

class InvalidTau : public Error {
public:
    using Error::Error;
};

class NegativeMultiplier : public Error {
public:
    using Error::Error;
};

class InvalidAlpha : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// More than the allowed number of curvature-guard redraws for one replicate.
class TooManyRejections : public Error {
public:
    TooManyRejections(std::size_t replicate, std::size_t attempts)
        : Error("replicate " + std::to_string(replicate) + " rejected " +
                std::to_string(attempts) + " times by the curvature guard"),
          replicate_(replicate) {}

    std::size_t replicate() const noexcept { return replicate_; }

private:
    std::size_t replicate_;
};

class SingularH2 : public Error {
public:
    using Error::Error;
};

/// Bad configuration value; carries the offending key and, for files, the line.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& message, std::size_t line = 0)
        : Error(format(key, message, line)), key_(std::move(key)), message_(message), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    const std::string& message() const noexcept { return message_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, const std::string& message,
                              std::size_t line) {
        std::string out = "config";
        if (line > 0) out += " line " + std::to_string(line);
        if (!key.empty()) out += " key '" + key + "'";
        return out + ": " + message;
    }

    std::string key_;
    std::string message_;
    std::size_t line_;
};

}  // namespace simboot
