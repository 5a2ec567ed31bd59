#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsb {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed JSON input. `offset` is the byte position reported by the parser.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A well-formed record that lacks a required field.
class RecordRejected : public Error {
public:
    RecordRejected(const std::string& what, std::optional<std::string> record_id)
        : Error(what), record_id_(std::move(record_id)) {}
    const std::optional<std::string>& record_id() const noexcept { return record_id_; }

private:
    std::optional<std::string> record_id_;
};

/// CSV / text-format violation. `line` is 1-based, 0 when not line-specific.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line)
        : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Crawl aborted after exhausting retries. Restart with `before = last_cursor()`.
class CrawlError : public Error {
public:
    CrawlError(const std::string& what, std::int64_t last_cursor)
        : Error(what), last_cursor_(last_cursor) {}
    std::int64_t last_cursor() const noexcept { return last_cursor_; }

private:
    std::int64_t last_cursor_;
};

/// The pagination cursor failed to move backwards between two pages.
class LoopDetected : public CrawlError {
public:
    using CrawlError::CrawlError;
};

/// Price data does not cover the requested days.
class CoverageError : public Error {
public:
    CoverageError(const std::string& what, std::vector<std::string> missing)
        : Error(what), missing_(std::move(missing)) {}
    const std::vector<std::string>& missing_dates() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace wsb
