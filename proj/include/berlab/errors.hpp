#pragma once
#include <stdexcept>

namespace berlab {

// Failures of the numerical machinery itself. The CLI maps these to exit code 3,
// while std::invalid_argument (bad domains, bad parameters, budget overruns) maps to 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sign-change scan found an even number of crossings: the configuration sits on a
// tangency and the root count cannot be trusted.
struct DegenerateTangencyError : NumericalError {
  using NumericalError::NumericalError;
};

// No root or no feasible configuration exists in the searched range.
struct InfeasibleError : NumericalError {
  using NumericalError::NumericalError;
};

// Requested enumeration or iteration exceeds the supported problem size.
struct BudgetError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An integrand or objective produced a non-finite value.
struct EvalError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace berlab
