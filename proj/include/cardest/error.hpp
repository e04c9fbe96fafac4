#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cardest {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument outside its mathematical domain (rates outside [0,1] and the like).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Bad user configuration: unknown feature names, invalid spec files, unsolvable sweep cells.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A malformed trace record. `row()` is 1-based and counts the header line.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Well-formed but semantically invalid record (negative timestamp, zero length, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Binary trace container problems (truncated pcap, unsupported link type).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input that makes an estimator or learner step undefined.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// A learner produced non-finite state.
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& what, std::optional<std::size_t> batch = std::nullopt)
        : Error(batch ? what + " (batch " + std::to_string(*batch) + ")" : what), batch_(batch) {}
    std::optional<std::size_t> batch() const noexcept { return batch_; }

private:
    std::optional<std::size_t> batch_;
};

}  // namespace cardest
