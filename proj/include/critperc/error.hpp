#pragma once

#include <stdexcept>
#include <string>

namespace critperc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// n*d is odd, so no d-regular (multi)graph on n vertices exists.
class ParityError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class AttemptsExhaustedError : public Error {
 public:
  using Error::Error;
};

class CapExceededError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class DisconnectedError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Exploration was asked to step after every vertex was explored.
class ExhaustedError : public Error {
 public:
  using Error::Error;
};

class RangeError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class InconsistencyError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class EmptySelectionError : public Error {
 public:
  using Error::Error;
};

// An internal invariant failed; indicates a bug rather than bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace critperc
