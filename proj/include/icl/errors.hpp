#pragma once

#include <stdexcept>
#include <string>

namespace icl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Automaton walk exceeded the hard length cap (malformed automaton).
struct GenerationOverflowError : Error {
  using Error::Error;
};

// Requested delta does not fit the donor entry's headroom.
struct InfeasibleShiftError : Error {
  using Error::Error;
};

// sup_distance over automata with different state sets / topology.
struct IncomparableAutomataError : Error {
  using Error::Error;
};

// Task input that an oracle cannot interpret (foreign symbol, bad delimiters).
struct MalformedInstanceError : Error {
  using Error::Error;
};

// Rejection budget exhausted while generating instances.
struct GenerationStarvationError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct TransportError : Error {
  using Error::Error;
};

struct CacheIntegrityError : Error {
  using Error::Error;
};

struct EncodingError : Error {
  using Error::Error;
};

struct FitError : Error {
  using Error::Error;
};

struct DegenerateFitError : Error {
  using Error::Error;
};

struct UndefinedCellError : Error {
  using Error::Error;
};

}  // namespace icl
