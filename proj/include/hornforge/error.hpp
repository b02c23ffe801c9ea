#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hornforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based; 0 when the input has no lines
/// (rule and query strings).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The rule shape is outside what an operation supports (e.g. non-chain rules
/// handed to the matrix oracle).
class UnsupportedRule : public Error {
 public:
  using Error::Error;
};

}  // namespace hornforge
