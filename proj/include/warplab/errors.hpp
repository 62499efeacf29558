#pragma once

#include <stdexcept>
#include <string>

namespace warplab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs outside an operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Curvature requested exactly at a junction, where f'' does not exist.
class BreakpointError : public DomainError {
 public:
  using DomainError::DomainError;
};

class PreconditionViolation : public DomainError {
 public:
  using DomainError::DomainError;
};

class SizeCapExceeded : public DomainError {
 public:
  using DomainError::DomainError;
};

class EmptyCurve : public DomainError {
 public:
  using DomainError::DomainError;
};

class WindowExceedsTrace : public DomainError {
 public:
  using DomainError::DomainError;
};

class IterationLimit : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateRegression : public Error {
 public:
  using Error::Error;
};

/// Malformed JSON/CSV input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace warplab
