#pragma once

#include <stdexcept>
#include <string>

namespace daec {

// Invalid argument to a numeric operation (bad sigma, out-of-grid center, Δ too large).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller-side contract violation, e.g. mismatched list lengths.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed file or document (.hmz, truth JSON, plan JSON).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment plan that cannot be executed as written.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Every Δ candidate was rejected during calibration.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace daec
