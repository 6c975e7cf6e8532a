#pragma once

#include <stdexcept>
#include <string>

namespace privdac {

/// A scenario, graph or option violates a documented invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The fixed-step integrator produced a non-finite value.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Jacobi eigensolver hit its sweep cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace privdac
