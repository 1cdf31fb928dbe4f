#pragma once

#include <stdexcept>
#include <string>

namespace tempering {

// Malformed or out-of-range input. Maps to CLI exit code 2.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A precondition on the mathematical object failed (e.g. the kernel is not
// reversible). Also exit code 2.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// State space or iteration budget exceeded. Exit code 3.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ArgumentError(message);
}

}  // namespace tempering
