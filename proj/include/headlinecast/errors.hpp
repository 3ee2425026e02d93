#pragma once

#include <stdexcept>
#include <string>

namespace hcast {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration: bad option values, malformed config files,
/// contradictory settings. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Invalid or insufficient input data: unreadable files, missing dates,
/// empty vocabularies, shape mismatches. CLI exit code 3.
class DataError : public Error {
public:
    using Error::Error;
};

/// Training cannot proceed: degenerate labels, non-finite losses.
/// CLI exit code 4.
class TrainError : public Error {
public:
    using Error::Error;
};

} // namespace hcast
