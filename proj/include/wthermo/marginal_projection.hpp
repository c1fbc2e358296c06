#pragma once

#include <cstddef>
#include <vector>

#include "wthermo/equilibrium.hpp"
#include "wthermo/pressure.hpp"

namespace wthermo {

// Prescribed n-cylinder probabilities of a shift-invariant measure, row-major
// over A_1^n.
struct MarginalConstraint {
  std::size_t n = 1;
  std::vector<double> p;
};

// Throws ConstraintError unless p is a strictly positive, normalised and
// shift-consistent vector (the relative interior of the feasible set).
void validate_constraint(const MarginalConstraint& c, std::size_t alphabet);

struct ProjectionOptions {
  // Sup-norm tolerance on (equilibrium marginals - p).
  double tol = 1e-9;
  std::size_t iteration_cap = 500;
  PressureFunctionOptions pressure;
};

struct ProjectionResult {
  std::vector<double> q;          // dual variables, gauge sum q = 0
  std::vector<double> marginals;  // n-cylinder marginals of the returned measure
  WeightedGibbsMeasure measure;   // equilibrium state of sum_I q(I) 1_[I]
  double entropy = 0.0;           // maximal weighted entropy (dual value)
  double marginal_error = 0.0;
  std::size_t iterations = 0;
};

// Maximum-weighted-entropy invariant measure with the prescribed marginals,
// found by minimising G(q) = P^a(T, sum_I q(I) 1_[I]) - p . q.
ProjectionResult project(const MarginalConstraint& c, const FactorChain& chain, const WeightVector& a,
                         const ProjectionOptions& options = {});

}  // namespace wthermo
