#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wthermo/equilibrium.hpp"
#include "wthermo/potential.hpp"
#include "wthermo/pressure.hpp"

namespace wthermo {

struct SpectrumSample {
  double q = 0.0;
  double alpha = 0.0;
  double f = 0.0;
};

// Legendre spectrum sampled parametrically in q: alpha(q) = Q'(q),
// f(alpha(q)) = Q(q) - q alpha(q). The domain [alpha_min, alpha_max] is the
// inner approximation alpha(q_min) .. alpha(q_max).
struct Spectrum {
  std::vector<SpectrumSample> samples;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  std::string description;
  bool degenerate() const { return samples.size() == 1; }
};

// 2 * steps + 1 equally spaced values covering [-q_max, q_max], including 0.
std::vector<double> symmetric_q_grid(double q_max, std::size_t steps);

// Spectrum of Birkhoff averages of Phi. The level sets are indexed by the
// total potential only, so no per-level split of Phi enters here.
Spectrum birkhoff_spectrum(const FiniteDepthPotential& phi, const FactorChain& chain,
                           const WeightVector& a, const std::vector<double>& q_grid,
                           const PressureFunctionOptions& options = {});

enum class VectorSpectrumStatus { in_domain, outside_domain };

struct VectorSpectrumResult {
  VectorSpectrumStatus status = VectorSpectrumStatus::in_domain;
  double f = 0.0;
  std::vector<double> q;
  std::size_t iterations = 0;
};

struct VectorSpectrumOptions {
  PressureFunctionOptions pressure;
  double gradient_tol = 1e-8;
  std::size_t iteration_cap = 500;
  // |q| beyond which a still-decreasing objective is declared unbounded.
  double divergence_radius = 1e3;
};

// f(alpha) = inf_q {Q(q) - alpha . q} by quasi-Newton descent on the convex dual.
VectorSpectrumResult vector_spectrum(const std::vector<FiniteDepthPotential>& phis, const FactorChain& chain,
                                     const WeightVector& a, const std::vector<double>& alpha_target,
                                     const std::vector<double>& q_init,
                                     const VectorSpectrumOptions& options = {});

// Psi = sum_i a_i log mu_i(tau_{i-1} x_1) as a depth-1 table on level 1.
FiniteDepthPotential local_dimension_potential(const WeightedGibbsMeasure& mu);

// Local-dimension spectrum of an exact weighted Gibbs measure: the Birkhoff
// spectrum of -Psi, so alpha is the local dimension and
// f(alpha) = inf_q {P^a(T, q Psi) + alpha q}.
Spectrum local_dimension_spectrum(const WeightedGibbsMeasure& mu, const std::vector<double>& q_grid,
                                  const PressureFunctionOptions& options = {});

// Hausdorff dimension of the set of eta-generic points: h^a_eta.
EntropyBracket generic_set_dimension(const InvariantMeasureSpec& eta, const FactorChain& chain,
                                     const WeightVector& a, const EntropyOptions& options = {});

// dim_H (X, d_a) = P^a(T, 0).
PressureEnclosure dimension_of_space(const FactorChain& chain, const WeightVector& a);

}  // namespace wthermo
