#pragma once

#include <stdexcept>
#include <string>

namespace risq {

/// Base class of all library errors. `code()` gives a stable process exit
/// code so the CLI can distinguish error classes.
class Error : public std::runtime_error {
 public:
  Error(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

/// Invalid argument to an operation (empty batch, m = 0, out-of-range parameter).
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(3, what) {}
};

/// Structural problem in a spec or configuration (dimension mismatch,
/// invalid probability vector, bad loss/risk pairing).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(4, what) {}
};

/// A resource cap was exceeded (trajectory enumeration).
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(5, what) {}
};

/// The shortfall threshold is not attainable on the search bracket.
class InfeasibleThresholdError : public Error {
 public:
  explicit InfeasibleThresholdError(const std::string& what) : Error(6, what) {}
};

/// Numeric range violation (exponent overflow and the like).
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(7, what) {}
};

/// File / stream failure.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(8, what) {}
};

/// Malformed input text (risk spec strings, MDP files, sample files).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(9, what) {}
};

/// An oracle computation failed (non-finite values, argmin on grid edge).
class OracleError : public Error {
 public:
  explicit OracleError(const std::string& what) : Error(10, what) {}
};

}  // namespace risq
