#pragma once

#include <stdexcept>
#include <string>

namespace pbsrdd {

// Invalid model input: bad species/reaction specs, malformed configs.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A lattice state that contradicts the requested operation, e.g. an energy
// exclusion for a particle that is not present.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure in a solver (time step stall, negative concentration).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pbsrdd
