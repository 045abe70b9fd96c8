#pragma once

#include <stdexcept>
#include <string>

namespace dft {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated precondition of a public operation.
struct PreconditionError : Error {
  using Error::Error;
};

// |W(k)| below the resonance threshold.
struct ResonanceError : Error {
  using Error::Error;
};

// Requested work exceeds a path's budget.
struct BudgetError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct BlowUpError : Error {
  using Error::Error;
};

}  // namespace dft
