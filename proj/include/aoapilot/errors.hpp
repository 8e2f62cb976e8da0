#pragma once

#include <stdexcept>
#include <string>

namespace aoapilot {

// Invalid configuration or precondition violation on user-facing input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A search would exceed its configured evaluation budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or a singular geometric configuration.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aoapilot
