#pragma once

#include <stdexcept>
#include <string>

namespace dnazen {

// Problems with user-supplied inputs: flags, config values, malformed files,
// out-of-range labels. The CLI maps these to exit code 1; anything else
// (including NumericError) maps to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

struct ParseError : ValidationError {
  ParseError(const std::string& what, std::size_t line)
      : ValidationError(what + " (line " + std::to_string(line) + ")"), line(line) {}
  explicit ParseError(const std::string& what) : ValidationError(what), line(0) {}
  std::size_t line;
};

// Non-finite values or other numeric breakdown inside the model.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dnazen
