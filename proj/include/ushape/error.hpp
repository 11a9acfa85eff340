#pragma once

#include <stdexcept>
#include <string>

namespace ushape {

/// Input violates a mathematical precondition (bad interval, point outside a
/// domain, nonpositive weight, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller combined options that make no sense together (wrong model for the
/// data, too few replications, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed external input. `row()` is the 1-based line number in the
/// source file, or 0 when the error is not tied to a row.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row = 0)
      : std::runtime_error(row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ushape
