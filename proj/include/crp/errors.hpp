#pragma once

#include <stdexcept>
#include <string>

namespace crp {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An integral or transform that is infinite for the requested argument.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The survival probability of the current interarrival underflowed.
class DegenerateTailError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested closed form does not exist for this combination of inputs.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Monte Carlo run invalidated (too many excluded paths, bad sample size).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario or configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crp
