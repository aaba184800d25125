#ifndef DEGENWAVE_ERRORS_HPP
#define DEGENWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace degenwave {

/// Invalid model parameters or operation preconditions.
struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Runtime failure of a numerical routine (integrator, quadrature, bracket).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Both bracket ends produced the same shooting outcome.
struct BracketInvalid : SolverError {
  using SolverError::SolverError;
};

/// Iteration budget exhausted without meeting tolerance.
struct NonConvergent : SolverError {
  using SolverError::SolverError;
};

}  // namespace degenwave

#endif
