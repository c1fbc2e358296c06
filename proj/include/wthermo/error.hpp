#pragma once

#include <stdexcept>
#include <string>

namespace wthermo {

// Invalid model data: malformed chains, weights, potentials or measures.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation needs more enumeration work than the budget allows.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A marginal constraint lies on the boundary of (or outside) the feasible set.
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Iterative solvers that did not reach their tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wthermo
