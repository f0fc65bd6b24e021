#pragma once

#include <stdexcept>
#include <string>

namespace gwlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad index, non-normalized amplitudes, invalid partition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A scalar argument outside the domain of a function (e.g. f_alpha(x) with x > 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A closed form was requested for a state or an order where it does not apply.
class ApplicabilityError : public Error {
 public:
  using Error::Error;
};

/// Closed form requested on a state that does not carry GW-family provenance.
class ProvenanceError : public ApplicabilityError {
 public:
  using ApplicabilityError::ApplicabilityError;
};

/// An internal consistency check between two computation routes failed.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace gwlab
