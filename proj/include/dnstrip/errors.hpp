#pragma once

#include <stdexcept>
#include <string>

namespace dnstrip {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument, malformed profile data or violated precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A hypothesis required by a theorem-level driver does not hold.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// Operation needs data the object does not carry (e.g. no angle function).
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Factorization or iteration failure inside a solver.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace dnstrip
