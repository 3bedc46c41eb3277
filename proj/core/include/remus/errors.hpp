#pragma once

#include <stdexcept>
#include <string>

namespace remus {

// Base class for all remus errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class JointLimitError : public Error {
 public:
  using Error::Error;
};

class UnreachableError : public Error {
 public:
  using Error::Error;
};

class InfeasibleStateError : public Error {
 public:
  using Error::Error;
};

class MalformedMessageError : public Error {
 public:
  using Error::Error;
};

class InvalidMeasureError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class EmptySampleError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Broken internal invariant; maps to CLI exit code 4.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace remus
