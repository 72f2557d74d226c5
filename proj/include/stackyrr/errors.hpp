#pragma once

#include <stdexcept>
#include <string>

namespace stackyrr {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: group axioms, action laws, JSON shape.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (conductor, group order, tuple count) was hit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two independent computations of the same quantity disagreed.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace stackyrr
