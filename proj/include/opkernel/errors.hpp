#pragma once

#include <stdexcept>
#include <string>

namespace opk {

/// Base class for every failure raised by the library. `reason()` is a short
/// machine-readable code (e.g. "order_violated") surfaced by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string reason, const std::string& what)
      : std::runtime_error(what), reason_(std::move(reason)) {}

  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

/// Shapes, indices or parameters that do not fit together.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension_mismatch", what) {}
};

/// Input is well-formed but violates a mathematical precondition
/// (non-PSD Gram, order violated, map not CP, ...).
class PreconditionError : public Error {
 public:
  PreconditionError(std::string reason, const std::string& what) : Error(std::move(reason), what) {}
};

/// An internal consistency check failed after computation.
class NumericalError : public Error {
 public:
  NumericalError(std::string reason, const std::string& what) : Error(std::move(reason), what) {}
};

/// Malformed job or kernel document.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error("schema_error", what) {}
};

}  // namespace opk
