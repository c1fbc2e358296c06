#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wthermo/potential.hpp"
#include "wthermo/shift_space.hpp"

namespace wthermo {

enum class PressureMethod { closed_form, enclosure };
std::string to_string(PressureMethod m);

// Point estimate of P^a(T, Phi) and an interval [lo, hi] that contains it,
// certified modulo floating-point rounding.
struct PressureEnclosure {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_used = 0;
  PressureMethod method = PressureMethod::closed_form;

  double width() const { return hi - lo; }
  bool contains(double value, double slack = 0.0) const {
    return lo - slack <= value && value <= hi + slack;
  }
};

struct PressureOptions {
  std::size_t n_max = 12;
  // Upper bound on the number of words enumerated at levels >= 2 for one n.
  std::size_t word_budget = 10'000'000;
  // Use cylinder enumeration even when a closed form exists.
  bool force_enumeration = false;
};

// Largest n <= n_max whose enumeration fits the budget.
std::size_t affordable_length(const FactorChain& chain, const PressureOptions& options);

// log c_n for c_n = theta_k o ... o theta_1(Phi) at length n.
double cascaded_log_sum(const PotentialPtr& phi, const FactorChain& chain, const WeightVector& a,
                        std::size_t n, PushMode mode = PushMode::fast);

// Per-symbol cascade of a depth-1 potential: log W^(0) = g and
// log W^(i)_j = A_i log sum_{pi_i(s) = j} exp(log W^(i-1)_s / A_i).
struct Depth1Cascade {
  std::vector<std::vector<double>> log_weights;  // W^(0) .. W^(k-1)
  double pressure = 0.0;

  // log of the equilibrium (Bernoulli) probability of each symbol at `level`,
  // i.e. the level marginal of the a-weighted equilibrium state.
  std::vector<double> level_log_probabilities(const FactorChain& chain, const WeightVector& a,
                                              int level) const;
};

Depth1Cascade depth1_cascade(const FiniteDepthPotential& phi, const FactorChain& chain,
                             const WeightVector& a);

// Exact pressure of a depth-1 potential: cascade per-symbol weights and finish
// with A_k log sum_top w_top^{1/A_k}.
PressureEnclosure pressure_closed_form_depth1(const FiniteDepthPotential& phi, const FactorChain& chain,
                                              const WeightVector& a);

// Enclosure from s_n = log c_n, n = 1..N: hi = min s_n/n,
// lo = max (s_n - C)/n, estimate = Aitken extrapolation of s_n - s_{n-1}.
PressureEnclosure pressure_by_enumeration(const PotentialPtr& phi, const FactorChain& chain,
                                          const WeightVector& a, const PressureOptions& options = {});

PressureEnclosure pressure(const FiniteDepthPotential& phi, const FactorChain& chain,
                           const WeightVector& a, const PressureOptions& options = {});

// Extrapolated limit of a sequence approaching its limit geometrically.
double aitken_limit(const std::vector<double>& values);

enum class GradientMethod { analytic_depth1, finite_difference };
std::string to_string(GradientMethod m);

struct PressureFunctionSample {
  std::vector<double> q;
  double value = 0.0;
  std::vector<double> gradient;
  GradientMethod gradient_method = GradientMethod::analytic_depth1;
  PressureEnclosure enclosure;
};

struct PressureFunctionOptions {
  PressureOptions pressure;
  double step = 1e-4;
  // Finite differences are refused when enclosure width > width_to_step * step.
  double width_to_step = 1e4;
  bool force_finite_difference = false;
};

// Q(q) = P^a(T, sum_i q_i Phi_i) and its gradient (the equilibrium averages).
PressureFunctionSample pressure_function(const std::vector<FiniteDepthPotential>& phis,
                                         const FactorChain& chain, const WeightVector& a,
                                         const std::vector<double>& q,
                                         const PressureFunctionOptions& options = {});

enum class ConvexityVerdict { strictly_convex, affine_within_tol };
std::string to_string(ConvexityVerdict v);

struct ConvexityReport {
  ConvexityVerdict verdict = ConvexityVerdict::strictly_convex;
  double max_deviation = 0.0;
  double tolerance = 0.0;
};

// Samples Q on q0 + t direction, t in [-span, span], and compares Q with its
// chord. An affine profile means the direction is numerically cohomologous
// to a constant.
ConvexityReport convexity_probe(const std::vector<FiniteDepthPotential>& phis, const FactorChain& chain,
                                const WeightVector& a, const std::vector<double>& direction,
                                const std::vector<double>& q0, double span, std::size_t samples,
                                const PressureOptions& options = {});

}  // namespace wthermo
