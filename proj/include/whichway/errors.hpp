#pragma once

#include <stdexcept>
#include <string>

namespace whichway {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (non-unitary matrix, bad range, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fermions were placed in the same mode.
class PauliExclusionError : public Error {
 public:
  using Error::Error;
};

/// A post-selection predicate matched no branch with non-zero probability.
class ImpossiblePostselection : public Error {
 public:
  using Error::Error;
};

}  // namespace whichway
