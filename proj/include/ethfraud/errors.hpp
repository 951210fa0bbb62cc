#pragma once

#include <stdexcept>
#include <string>

namespace ethfraud {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed caller input (bad address, bad argument combination).
struct InputError : Error {
  using Error::Error;
};

// Bad file contents; messages carry the 1-based line number where possible.
struct ParseError : Error {
  using Error::Error;
};

// HTTP failure that survived the retry budget.
struct TransportError : Error {
  using Error::Error;
};

// The remote API answered with an error payload.
struct RemoteError : Error {
  using Error::Error;
};

// Degenerate training input or a training run that failed to converge.
struct TrainingError : Error {
  using Error::Error;
};

}  // namespace ethfraud
