#pragma once

#include <stdexcept>
#include <string>

namespace pdmp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Enumeration-based checks refuse dimensions they cannot afford.
class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

/// A thinning evaluation exceeded its advertised dominating rate.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

/// Closed forms that diverge at the aligned angles n*pi/4.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// A structural assumption (e.g. identity fast scales) does not hold.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// Simulation refused to continue (runaway event count).
class EventLimitExceeded : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration error; the message starts with the field path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace pdmp
