#pragma once

#include <stdexcept>
#include <string>

namespace pmarl {

// Caller broke a documented precondition (shape mismatch, wrong variant, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A NaN or Inf reached a gradient, loss or parameter.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario generation ran out of placement retries.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoint, scenario or config document failed schema validation.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pmarl
