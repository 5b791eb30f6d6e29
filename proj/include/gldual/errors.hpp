#pragma once

#include <stdexcept>
#include <string>

namespace gldual {

// Shape/grid incompatibility between operands.
struct GridMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iterative solver ran out of iterations; carries the last residual seen.
struct SolverError : std::runtime_error {
  double final_residual;
  SolverError(const std::string& msg, double residual)
      : std::runtime_error(msg), final_residual(residual) {}
};

// An operator violated a definiteness precondition (e.g. negative curvature
// detected inside a CG solve that required SPD).
struct IndefiniteOperatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A dual variable left its feasible set; `node` is the worst offender.
struct FeasibilityError : std::domain_error {
  int node;
  FeasibilityError(const std::string& msg, int worst_node)
      : std::domain_error(msg), node(worst_node) {}
};

// A verifier was asked to run under hypotheses the data does not satisfy.
struct HypothesisError : std::runtime_error {
  std::string flag;
  HypothesisError(const std::string& msg, std::string failed_flag)
      : std::runtime_error(msg), flag(std::move(failed_flag)) {}
};

}  // namespace gldual
