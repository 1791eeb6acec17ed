#pragma once

#include <stdexcept>
#include <string>

namespace paofed {

/// Raised when an operation receives arguments outside its contract.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration problem, tagged with the JSON path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A broken internal invariant (e.g. an over-age message reaching the server).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace paofed
