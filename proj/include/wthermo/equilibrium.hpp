#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "wthermo/potential.hpp"
#include "wthermo/pressure.hpp"
#include "wthermo/shift_space.hpp"

namespace wthermo {

// Shift-invariant comparison measure on the level-1 full shift: Bernoulli, or
// a stationary Markov chain.
class InvariantMeasureSpec {
 public:
  enum class Kind { bernoulli, markov };

  static InvariantMeasureSpec bernoulli(std::vector<double> p);
  static InvariantMeasureSpec markov(std::vector<double> initial,
                                     std::vector<std::vector<double>> transition);

  Kind kind() const { return kind_; }
  std::size_t alphabet_size() const { return initial_.size(); }
  // Bernoulli weights, or the stationary initial distribution.
  const std::vector<double>& initial() const { return initial_; }
  // For Bernoulli measures every row equals the weight vector.
  const std::vector<std::vector<double>>& transition() const { return transition_; }

  // log eta([w]); -inf for null cylinders.
  double log_mass(std::span<const Symbol> w) const;
  double log_mass(const Word& w) const { return log_mass(w.symbols); }
  // eta([I]) for all I in A^n, row-major.
  std::vector<double> block_marginals(std::size_t n) const;
  // Phi_*(eta) = E_eta g(x_1 .. x_depth).
  double expectation(const FiniteDepthPotential& phi) const;
  // Entropy of eta itself.
  double entropy() const;

 private:
  InvariantMeasureSpec(Kind kind, std::vector<double> initial, std::vector<std::vector<double>> transition);

  Kind kind_;
  std::vector<double> initial_;
  std::vector<std::vector<double>> transition_;
};

// Entropy value with a bracket [lo, hi]; lo == hi when exact.
struct EntropyBracket {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

struct EntropyOptions {
  std::size_t word_budget = 2'000'000;
  std::size_t max_block = 14;
};

// Entropy rate of the image of a stationary Markov chain under a symbol map,
// bracketed by H(Y_n | Y^{n-1}, X_1) <= h <= H(Y_n | Y^{n-1}).
EntropyBracket hidden_markov_entropy(const InvariantMeasureSpec& eta, std::span<const Symbol> symbol_map,
                                     std::size_t image_alphabet, const EntropyOptions& options = {});

// h^a = sum_i a_i h(eta o tau_{i-1}^{-1}).
EntropyBracket weighted_entropy(const InvariantMeasureSpec& eta, const FactorChain& chain,
                                const WeightVector& a, const EntropyOptions& options = {});

enum class GibbsNormalization { exact_depth1, gibbs_ratio };
std::string to_string(GibbsNormalization mode);

// log of a mass together with a bound on |log(true mass) - value|.
struct LogMass {
  double value = 0.0;
  double log_ratio_bound = 0.0;
};

// The a-weighted Gibbs / equilibrium measure of a finite-depth potential.
// Depth-1 potentials give an exact Bernoulli measure; deeper potentials give
// masses defined by the Gibbs formula, known up to a bounded ratio.
class WeightedGibbsMeasure {
 public:
  WeightedGibbsMeasure(FiniteDepthPotential phi, FactorChain chain, WeightVector a,
                       const PressureOptions& options = {});

  GibbsNormalization mode() const { return mode_; }
  const PressureEnclosure& pressure() const { return pressure_; }
  const FactorChain& chain() const { return chain_; }
  const WeightVector& weights() const { return a_; }
  const FiniteDepthPotential& potential() const { return phi_; }
  const PotentialCascade& cascade() const { return cascade_; }

  LogMass cylinder_mass(const Word& I) const;
  // Mass of the level-i marginal mu o tau_{i-1}^{-1} on [J].
  LogMass marginal_mass(int level, const Word& J) const;
  // mu(B(x, e^{-n/a_1})) for a centre prefix of length >= l_k(n).
  LogMass ball_mass(const Word& x_prefix, std::size_t n) const;

  // Exact mode only.
  std::vector<double> level_log_probabilities(int level) const;
  InvariantMeasureSpec as_bernoulli() const;

 private:
  void require_exact(const char* what) const;

  FiniteDepthPotential phi_;
  FactorChain chain_;
  WeightVector a_;
  GibbsNormalization mode_;
  PressureEnclosure pressure_;
  PotentialCascade cascade_;
  PotentialPtr weighted_;
  std::vector<std::vector<double>> level_logp_;
};

struct QuasiBernoulliReport {
  double log_constant = 0.0;
  bool quasi_bernoulli = true;
};

// max over |I|, |J| <= n_max of |log m(IJ) - log m(I) - log m(J)|.
QuasiBernoulliReport quasi_bernoulli_diagnostic(const std::function<double(const Word&)>& log_mass,
                                                std::size_t alphabet, std::size_t n_max);
QuasiBernoulliReport quasi_bernoulli_diagnostic(const WeightedGibbsMeasure& mu, std::size_t n_max);
QuasiBernoulliReport quasi_bernoulli_diagnostic(const InvariantMeasureSpec& eta, std::size_t n_max);

// max over |I| <= n_max of |a log mu(I) + b log nu(pi I) - log phi(I) + n P| (k = 2).
double product_relation_check(const WeightedGibbsMeasure& mu, std::size_t n_max);

// Calls f on every level-`level` word of each length 1..n_max, shortest first.
void for_each_word(int level, std::size_t alphabet, std::size_t n_max,
                   const std::function<void(const Word&)>& f);

}  // namespace wthermo
