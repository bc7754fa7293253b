#pragma once

#include <stdexcept>
#include <string>

namespace psr {

// Base class for every failure mode this library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conditioning on an action-observation pair whose probability from the
// current state is at or below the zero cutoff. The resulting state would
// be undefined, so the step is refused and the state left untouched.
class ImpossibleObservation : public Error {
 public:
  using Error::Error;
};

// A requested test's outcome vector falls outside the span of the core
// tests' outcome vectors beyond the residual tolerance.
class SpanViolation : public Error {
 public:
  using Error::Error;
};

// A caller-supplied core-test set is linearly dependent or does not span
// the space the automatic search finds.
class InvalidOverride : public Error {
 public:
  using Error::Error;
};

// A derivation from a truncated matrix needs a column deeper than the
// matrix carries.
class DepthInsufficient : public Error {
 public:
  using Error::Error;
};

// A model file or matrix file violates the schema; the message names the
// offending field path.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Rendered sequence text that does not parse under the given alphabet.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace psr
