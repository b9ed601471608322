#pragma once

#include <stdexcept>
#include <string>

namespace focalctx {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: configuration, flags, corpus files, unknown ids.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A requested source range does not lie inside the compilation unit.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Input that cannot be turned into a model at all (unbalanced top-level braces,
/// unterminated block comment).
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(message + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// Malformed builtin signature table; carries the 1-based line number.
class LoadError : public Error {
public:
    LoadError(const std::string& message, int line)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class AmbiguityError : public Error {
public:
    using Error::Error;
};

} // namespace focalctx
