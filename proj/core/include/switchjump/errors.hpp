#pragma once

#include <stdexcept>
#include <string>

namespace switchjump {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (nonpositive period, zero inner samples, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Shape or period mismatch among model coefficients.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A structural assumption on the rate matrix (Q1, Q3, ...) does not hold.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

// A model parameter violates a preset's constraints.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Non-finite state produced by the integrator before the cap was reached.
class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

// Not enough data for a statistical check.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// The escape-level search ran past the representable index range.
class DepthExhausted : public Error {
 public:
  using Error::Error;
};

// Series over regimes whose remainder cannot be bounded.
class TailDivergence : public Error {
 public:
  using Error::Error;
};

}  // namespace switchjump
