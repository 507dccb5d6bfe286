#pragma once

#include <stdexcept>
#include <string>

namespace tnsim {

/// Malformed or inconsistent input data (bad file, schema violation,
/// violated precondition on user-supplied arguments).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse failure with the 1-based line number of the offending record.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A numerical or algorithmic failure after inputs were accepted.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tnsim
