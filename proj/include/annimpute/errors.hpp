#pragma once

#include <stdexcept>
#include <string>

namespace annimpute {

// Malformed or inconsistent input data (files, dimensions, labels).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training diverged or produced non-finite values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration supplied by the caller.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace annimpute
