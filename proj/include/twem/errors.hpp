#pragma once

#include <stdexcept>
#include <string>

namespace twem {

// Error categories map onto process exit codes (see cli.cpp):
//   UsageError -> 1, DataError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flags, bad configuration, preconditions the caller controls.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed input files, schema mismatches, unknown labels/tokens,
// corrupt model files.
class DataError : public Error {
 public:
  using Error::Error;
};

// Shape mismatches, non-finite losses/gradients, degenerate numeric input.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace twem
