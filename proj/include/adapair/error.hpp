#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adapair {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (maps to CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed LIBSVM input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A dataset, split or stage subset lacks one of the two classes.
class ClassEmptyError : public Error {
 public:
  using Error::Error;
};

/// Non-finite iterate during training.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Vectors of incompatible dimensionality.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration would exceed the configured pair cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace adapair
