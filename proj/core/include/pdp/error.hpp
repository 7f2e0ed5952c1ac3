#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdp {

// Error categories map onto distinct process exit codes in the CLI.

/// A required file, directory or argument is missing or unusable.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input file does not follow its documented format.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A pipeline stage cannot proceed on otherwise well-formed data.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pdp
