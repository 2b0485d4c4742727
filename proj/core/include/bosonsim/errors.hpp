#pragma once

#include <stdexcept>
#include <string>

namespace bosonsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state descriptor violates its invariants (negative means, weights not summing to one, ...).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// The state has no support for the requested number of particles (Z_q = 0).
class DegenerateState : public Error {
 public:
  using Error::Error;
};

/// The requested particle number exceeds what an evaluation route supports.
class OrderTooLarge : public Error {
 public:
  using Error::Error;
};

/// A rejection loop hit its hard iteration cap.
class SamplingStalled : public Error {
 public:
  using Error::Error;
};

/// Geometry-first sampling was requested for a state without a positive P function.
class NotClassicalState : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

/// Reweighting estimator used on frames that carry no intensity.
class MissingIntensity : public Error {
 public:
  using Error::Error;
};

/// No frame holds enough particles to form a single q-tuple.
class InsufficientMultiplicity : public Error {
 public:
  using Error::Error;
};

/// A perimeter was requested for a point sitting exactly at the origin.
class DegeneratePoint : public Error {
 public:
  using Error::Error;
};

/// Malformed state/basis token or input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for the given basis/state combination.
class UnsupportedCombination : public Error {
 public:
  using Error::Error;
};

}  // namespace bosonsim
