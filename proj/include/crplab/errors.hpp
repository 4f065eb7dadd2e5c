#pragma once

#include <stdexcept>

namespace crplab {

// Caller violated a documented precondition or invariant.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Request exceeds a documented resource budget; retry with a smaller size.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation is undefined in the requested parameter regime.
class UnsupportedRegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid command line or config file; message names the offending token.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crplab
