#pragma once

#include <stdexcept>
#include <string>

namespace confheat {

/// Invalid arguments: non-finite coordinates, negative times, malformed grids.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration would exceed a hard limit (subset, partition or permanent sizes).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical routine failed to reach its tolerance (quadrature, simplex).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested operation is not available for the given object (e.g. lifting a custom kernel).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// User functional returned NaN/inf.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment settings that cannot deliver the requested accuracy.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Report files could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace confheat
