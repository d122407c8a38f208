#pragma once

#include <stdexcept>
#include <string>

namespace uavnav {

// Caller broke a precondition (bad shapes, mismatched counts, non-finite input).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A tensor op produced NaN/Inf, or a loss diverged.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario rejection sampling ran out of attempts.
class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation metric requested over an empty result set.
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace uavnav
