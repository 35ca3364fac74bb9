#pragma once

#include <stdexcept>
#include <string>

namespace quitsolve {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed game, profile or file contents.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Expected absorbing payoff requested for a profile with p(x) = 0.
class NonAbsorbingProfile : public Error {
 public:
  using Error::Error;
};

// An iterative solver exhausted its budget. Callers usually retry from a
// better warm start or with a smaller continuation step.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

// Path tracer hit the minimum step size.
class PathStalled : public Error {
 public:
  using Error::Error;
};

// The sign pattern of the indifference function along a path did not
// bracket a root.
class IndifferenceRootNotBracketed : public Error {
 public:
  using Error::Error;
};

// Joint fixed-point iterate left the absorbing region.
class AbsorptionCollapse : public Error {
 public:
  using Error::Error;
};

}  // namespace quitsolve
