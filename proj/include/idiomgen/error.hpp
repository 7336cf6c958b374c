#pragma once

#include <stdexcept>
#include <string>

namespace idiomgen {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A diagram transformation (substitution, merge) could not produce a
// well-formed result.
class TransformError : public Error {
 public:
  using Error::Error;
};

// Concrete-idiom instantiation failed: missing idiom, misplaced partial
// value, unfilled hole.
class InstantiationError : public Error {
 public:
  using Error::Error;
};

// Static or dynamic failure inside one of the artifact languages.
class LanguageError : public Error {
 public:
  using Error::Error;
};

// Parse failure with a source location. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::string file, int line, int column, const std::string& message)
      : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        file_(std::move(file)),
        line_(line),
        column_(column),
        message_(message) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string file_;
  int line_;
  int column_;
  std::string message_;
};

}  // namespace idiomgen
