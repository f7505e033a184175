#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fwdeep {

/// Precondition violated by a caller.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double at) : std::runtime_error(what), at_(at) {}

  /// The step size or iteration index at which the failure occurred.
  double at() const noexcept { return at_; }

 private:
  double at_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace fwdeep
