#pragma once

#include <stdexcept>
#include <string>

namespace swingbench {

/// Base class for all swingbench errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input network failed structural validation (bad index, nonpositive
/// weight/parameter, duplicate edge, too few nodes, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Algebraic connectivity check failed: lambda_2 is within tolerance of
/// zero, so the network is (numerically) disconnected.
class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

/// smib closed forms require strictly positive M, D, B.
class NonPositiveParameter : public Error {
 public:
  using Error::Error;
};

/// transform_io was handed a matrix that is not orthogonal.
class NotOrthogonal : public Error {
 public:
  using Error::Error;
};

/// jw*I - A is singular and the limit does not exist (zero mode observable
/// through the theta block at w = 0). Cannot happen for the built-in
/// output kinds; guards hand-constructed systems.
class SingularResolvent : public Error {
 public:
  using Error::Error;
};

/// A marginally stable mode has nonzero output gain; the H2 norm is
/// infinite. Guards hand-constructed modal systems.
class ObservableMarginalMode : public Error {
 public:
  using Error::Error;
};

/// Time-domain computation could not reach steady state / negligible tail
/// within the requested horizon.
class HorizonTooShort : public Error {
 public:
  using Error::Error;
};

/// shape_check needs more grid points inside the requested interval.
class IntervalTooSparse : public Error {
 public:
  using Error::Error;
};

/// Malformed network JSON (syntax or schema).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace swingbench
