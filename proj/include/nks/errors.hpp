#pragma once

#include <stdexcept>
#include <string>

namespace nks {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller-side mistakes: bad arguments, unknown names, undefined kernels.
/// The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// The computation ran but could not deliver a trustworthy number.
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
public:
  using Error::Error;
};

class DomainError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class UnknownActivation : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class NotPseudoDifferentiable : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class NTKUndefined : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class AmbiguousSmoothness : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class QuadratureUnderResolved : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class InsufficientData : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class InconclusiveTail : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NumericalOverflow : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace nks
