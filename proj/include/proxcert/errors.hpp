#pragma once

#include <stdexcept>
#include <string>

namespace proxcert {

/// Malformed or out-of-contract input data (non-symmetric Q, lam <= 0, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Solver or run configuration that violates a hypothesis (s > 1/L, alpha < 3, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Trace data inconsistent with the reference optimum it is certified against.
class DataCorruption : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No reference solution could be produced within budget.
class ReferenceUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rate fit requested over a window without enough usable points.
class FitUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trace file that cannot be read (bad version, missing columns, ...).
class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace proxcert
