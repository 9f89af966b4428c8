#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cskit {

// Raised when an input stream violates a file format. `line` is 1-based;
// 0 means the error is not tied to a specific line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                : message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Raised when parsed data violates a semantic invariant (ill-formed IOB,
// segment lengths that do not sum, unknown labels, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cskit
