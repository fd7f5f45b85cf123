#pragma once

#include <stdexcept>
#include <string>

namespace mmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction arguments or a malformed run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two fields that must live on the same mesh do not.
class MeshMismatch : public Error {
 public:
  using Error::Error;
};

/// A composition at or outside the boundary of the Gibbs triangle.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// An element whose average of a phase variable is not positive.
class DegenerateElement : public Error {
 public:
  using Error::Error;
};

/// A field expected to be mean-zero in the lumped inner product is not.
class NonZeroMean : public Error {
 public:
  using Error::Error;
};

/// A linear solve did not reach its residual tolerance.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// The Newton iteration for a time step did not converge.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, long step_index)
      : Error(what), step_index_(step_index) {}
  long step_index() const noexcept { return step_index_; }

 private:
  long step_index_;
};

/// The state handed to the stepper is not strictly inside the Gibbs triangle.
class InvalidPreviousState : public Error {
 public:
  using Error::Error;
};

}  // namespace mmc
