#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fnt {

// All toolkit failures derive from Error so callers (the CLI in particular)
// can map them to a nonzero exit status in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent parameters (thresholds, fractions, sizes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the 1-based line number when known.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// Non-finite parameters or loss encountered during optimisation.
class DivergenceError : public TrainingError {
 public:
  using TrainingError::TrainingError;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace fnt
