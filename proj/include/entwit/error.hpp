#pragma once

#include <stdexcept>
#include <string>

namespace entwit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree on a local or total dimension.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::string axis, long expected, long actual)
      : Error("dimension mismatch on " + axis + ": expected " + std::to_string(expected) +
              ", got " + std::to_string(actual)),
        axis_(std::move(axis)) {}

  const std::string& axis() const noexcept { return axis_; }

 private:
  std::string axis_;
};

/// Input fails a numeric invariant (Hermiticity, trace, positivity, weights).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Compression onto a local subspace leaves no trace.
class TruncationError : public Error {
 public:
  TruncationError() : Error("truncation annihilates state") {}
};

/// The grid oracle only handles small real instances.
class RefusalError : public Error {
 public:
  using Error::Error;
};

}  // namespace entwit
