#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace setproc {

// Base of everything the library throws. The CLI maps each subclass to an
// exit code (DataError -> 3, NumericalError -> 4, UsageError -> 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: dimension mismatch, empty dataset,
// schema violations.
class DataError : public Error {
 public:
  using Error::Error;
};

// Singular covariance, insufficient points for an estimator.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Operation not defined for the given model variant.
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

using WarningSink = std::function<void(std::string_view)>;

inline WarningSink& warning_sink() {
  static WarningSink sink = [](std::string_view msg) {
    std::clog << "setproc: warning: " << msg << '\n';
  };
  return sink;
}

// Replaces the process-wide warning sink; returns the previous one.
inline WarningSink set_warning_sink(WarningSink sink) {
  return std::exchange(warning_sink(), std::move(sink));
}

inline void warn(std::string_view msg) {
  if (warning_sink()) warning_sink()(msg);
}

}  // namespace setproc
