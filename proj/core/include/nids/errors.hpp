// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nids {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values or flag combinations.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Missing or malformed inputs: files, headers, labels, containers.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values produced during a numeric computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace nids
