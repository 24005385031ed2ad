#pragma once

#include <stdexcept>
#include <string>

namespace aammsu {

/// Operand lengths disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the domain of the operation (sqrt of a negative,
/// division by zero, non-positive constant, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A 1-based iteration index outside the range where a quantity is defined.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Invalid configuration, or a configuration that cannot support the request.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An optimizer or trace is missing the history a step requires.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An oracle that declared a gradient bound K emitted a gradient with norm > K.
class GradientBoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aammsu
