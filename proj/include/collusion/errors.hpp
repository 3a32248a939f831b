#pragma once

#include <stdexcept>
#include <string>

namespace collusion {

// Invalid input: a parameter outside its admissible range. The message names
// the offending field.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce an answer (no sign change, no
// convergence).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace collusion
