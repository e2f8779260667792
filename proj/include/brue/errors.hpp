#pragma once

#include <stdexcept>
#include <string>

namespace brue {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Network construction / validation failures.
struct InvalidNetwork : Error {
  using Error::Error;
};

// A path flow that does not satisfy demand or nonnegativity.
struct InvalidFlow : Error {
  using Error::Error;
};

// Some trip has no simple path from origin to destination.
struct NoPath : Error {
  using Error::Error;
};

// Path enumeration (or support enumeration) exceeded its cap.
struct PathExplosion : Error {
  using Error::Error;
};

// Malformed input file.
struct ParseError : Error {
  using Error::Error;
};

// Operation only implemented for binary state spaces.
struct UnsupportedStateSpace : Error {
  using Error::Error;
};

}  // namespace brue
