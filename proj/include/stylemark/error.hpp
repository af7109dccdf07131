#pragma once

#include <stdexcept>
#include <string>

namespace stylemark {

/// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: malformed files, invariant violations, empty documents.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Caller misuse of an operation (bad arguments, missing configuration).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to a translation endpoint.
class EndpointError : public Error {
 public:
  enum class Kind { Transient, Auth, Permanent };
  EndpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }
  bool transient() const { return kind_ == Kind::Transient; }

 private:
  Kind kind_;
};

}  // namespace stylemark
