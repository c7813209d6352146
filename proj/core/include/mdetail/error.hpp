#pragma once

#include <stdexcept>
#include <string>

namespace mdetail {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document. `path` names the offending field, e.g.
/// `buildings[0].facades[2].normal`.
class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Well-formed input that violates a geometric or semantic invariant.
class ValidationError : public Error {
public:
    ValidationError(std::string path, const std::string& what, double value = 0.0)
        : Error(path + ": " + what), path_(std::move(path)), value_(value) {}
    const std::string& path() const noexcept { return path_; }
    /// Measured quantity that failed the check (e.g. max plane deviation in m).
    double value() const noexcept { return value_; }

private:
    std::string path_;
    double value_;
};

/// Training aborted because a loss became non-finite or exceeded the bound.
class DivergenceError : public Error {
public:
    using Error::Error;
};

} // namespace mdetail
