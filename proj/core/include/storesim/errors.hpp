#pragma once

#include <stdexcept>
#include <string>

namespace storesim {

// Input file could not be read or did not match its schema.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input parsed but violates a documented invariant. The message names the
// first violated invariant and the offending entity.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal inconsistency detected mid-simulation (layout bug, tick
// regression, unreachable goal). Signals a bug upstream, not bad user input.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace storesim
