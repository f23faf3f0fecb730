#pragma once

#include <stdexcept>
#include <string>

namespace pinchflow {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation outside the smooth domain of a profile.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid argument or certificate parameters.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A condition check could not be sampled (e.g. the profile vanished at a sample).
class SamplingError : public Error {
 public:
  using Error::Error;
};

// Configuration the checks do not support (n_p != 1, pinch point away from 0).
class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

// Degenerate geometric state (r <= 0).
class DegenerateState : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced while evaluating the PDE.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, std::size_t node)
      : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

// An accepted step violated a state invariant. Carries a dump of the state.
class InternalConsistencyFault : public Error {
 public:
  InternalConsistencyFault(const std::string& what, std::string dump)
      : Error(what), dump_(std::move(dump)) {}
  const std::string& dump() const { return dump_; }

 private:
  std::string dump_;
};

// Trajectory analysis could not be carried out as requested.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

// Radius does not decrease over the final window: no finite-time pinch.
class NoFiniteTimeSingularity : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// Malformed scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pinchflow
