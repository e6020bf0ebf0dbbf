#pragma once

#include <stdexcept>
#include <string>

namespace lsep {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, non-positive power, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A transform or closed form was evaluated outside the region where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure failed to reach its tolerance and no usable result exists.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search was asked to enumerate more states than allowed.
class TooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace lsep
