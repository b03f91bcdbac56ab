#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uidforge {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain an operation is defined on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inputs are individually valid but contradict each other
/// (unbalanced interstate flows, ledger underflow).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Unknown-age mass cannot be prorated because the sex has no known-age mass.
class AllocationError : public Error {
public:
    using Error::Error;
};

/// Dual-system estimate with no overlap between the two lists.
class UndefinedEstimateError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class InitializationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. The message always carries "path:line: ".
class ParseError : public Error {
public:
    ParseError(const std::string &path, std::size_t line, const std::string &what)
        : Error(path + ":" + std::to_string(line) + ": " + what), path_{path}, line_{line} {}

    const std::string &path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

/// Well-formed rows whose content is rejected (duplicate keys, schema mix).
class DataError : public ParseError {
public:
    using ParseError::ParseError;
};

} // namespace uidforge
