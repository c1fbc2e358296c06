#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wthermo/shift_space.hpp"

namespace wthermo {

enum class PotentialRepr { finite_depth, matrix_cocycle, generic_pushed, weighted };

std::string to_string(PotentialRepr repr);

// A positive potential seen through its cylinder weights: log_weight(J) is
// log sup_{y in [J]} phi_n(y) for an n-word J at this potential's level.
//
// qm_log_constant() is a log c >= 0 with
//   log phi(J1) + log phi(J2) - c <= log phi(J1 J2) <= log phi(J1) + log phi(J2)
// for every pair of words. Finite-depth potentials derive it from their
// table; theta pushes preserve it unchanged.
class CylinderPotential {
 public:
  virtual ~CylinderPotential() = default;

  int level() const { return level_; }
  std::size_t alphabet_size() const { return alphabet_; }
  double qm_log_constant() const { return qm_log_constant_; }

  virtual PotentialRepr repr() const = 0;
  virtual double log_weight(std::span<const Symbol> word) const = 0;

  // log_weight with a level check.
  double eval(const Word& w) const;

 protected:
  CylinderPotential(int level, std::size_t alphabet, double qm_log_constant)
      : level_(level), alphabet_(alphabet), qm_log_constant_(qm_log_constant) {}

 private:
  int level_;
  std::size_t alphabet_;
  double qm_log_constant_;
};

using PotentialPtr = std::shared_ptr<const CylinderPotential>;

// Additive potential generated by a function g of the first `depth` symbols:
// phi_n(x) = exp(sum_{j<n} g(x_{j+1} ... x_{j+depth})). The table is
// row-major over A^depth with the first symbol most significant.
class FiniteDepthPotential final : public CylinderPotential {
 public:
  FiniteDepthPotential(int level, std::size_t alphabet, int depth, std::vector<double> log_table);

  static FiniteDepthPotential zero(std::size_t alphabet, int level = 1);
  static FiniteDepthPotential constant(std::size_t alphabet, double value, int level = 1);
  // Additive indicator of the cylinder [block]: g = 1 on that block, 0 elsewhere.
  static FiniteDepthPotential block_indicator(std::size_t alphabet, const Word& block);

  PotentialRepr repr() const override { return PotentialRepr::finite_depth; }
  double log_weight(std::span<const Symbol> word) const override;

  int depth() const { return depth_; }
  const std::vector<double>& log_table() const { return table_; }
  double g(std::span<const Symbol> block) const;
  double g_at(std::size_t block_index) const { return table_[block_index]; }
  double table_min() const;
  double table_max() const;
  double table_spread() const { return table_max() - table_min(); }
  bool is_depth1() const { return depth_ == 1; }

  // Number of (depth-1)-blocks (the transfer-matrix states); 1 when depth = 1.
  std::size_t state_count() const { return tail_sup_.size(); }
  // max over completions t of sum of the depth-1 block terms that straddle
  // the end of a word whose last depth-1 symbols encode `state`.
  double tail_sup(std::size_t state) const { return tail_sup_[state]; }

  // Exact Birkhoff sum S_n g(x) for a word x of length >= n + depth - 1.
  double birkhoff_sum(std::span<const Symbol> x, std::size_t n) const;

  // Same potential written with a larger depth (g ignores the extra symbols).
  FiniteDepthPotential broadcast(int depth) const;
  FiniteDepthPotential scaled(double factor) const;

 private:
  int depth_;
  std::vector<double> table_;
  std::vector<double> tail_sup_;
};

// log sup_{x in [I]} phi_n(x).
double phi_of_cylinder(const FiniteDepthPotential& p, const Word& I);

// Fiber sum of a finite-depth potential: psi(J) = (sum_{pi I = J} phi(I)^{1/A})^A
// evaluated as a positive transfer-matrix product over (depth-1)-block states
// with the tail sup as boundary vector.
class MatrixCocyclePotential final : public CylinderPotential {
 public:
  MatrixCocyclePotential(std::shared_ptr<const FiniteDepthPotential> source,
                         std::vector<Symbol> target_map, std::size_t target_alphabet,
                         int target_level, double exponent);

  PotentialRepr repr() const override { return PotentialRepr::matrix_cocycle; }
  double log_weight(std::span<const Symbol> word) const override;
  double exponent() const { return exponent_; }

 private:
  std::shared_ptr<const FiniteDepthPotential> source_;
  std::vector<std::vector<Symbol>> fibers_;
  double exponent_;
};

// Generic theta image: evaluates psi(J) by enumerating every I with pi I = J.
// Cost is exponential in |J|; results for short words are memoized.
class PushedPotential final : public CylinderPotential {
 public:
  PushedPotential(PotentialPtr inner, std::vector<Symbol> target_map, std::size_t target_alphabet,
                  int target_level, double exponent);

  PotentialRepr repr() const override { return PotentialRepr::generic_pushed; }
  double log_weight(std::span<const Symbol> word) const override;
  double exponent() const { return exponent_; }

  static constexpr std::size_t kMemoMaxEntries = std::size_t{1} << 20;
  static constexpr std::size_t kMemoMaxLength = 24;

 private:
  double evaluate(std::span<const Symbol> word) const;

  PotentialPtr inner_;
  std::vector<std::vector<Symbol>> fibers_;
  double exponent_;
  mutable std::shared_mutex memo_mutex_;
  mutable std::unordered_map<std::string, double> memo_;
};

enum class PushMode {
  fast,     // depth-1 closed form, matrix cocycles for deeper tables
  generic,  // never use the depth-1 shortcut (matrix cocycle or enumeration)
};

// Fiber-sum push through an arbitrary surjective symbol map with exponent A.
PotentialPtr push_through(const PotentialPtr& p, std::span<const Symbol> target_map,
                          std::size_t target_alphabet, int target_level, double exponent,
                          PushMode mode = PushMode::fast);

// theta_i : level-i potential -> level-(i+1) potential, exponent A_i.
PotentialPtr theta_push(const PotentialPtr& p, const FactorChain& chain, const WeightVector& a,
                        PushMode mode = PushMode::fast);

// phi^(0) .. phi^(k-1) and the scalar sequence theta_k o ... o theta_1(phi),
// represented as a potential on a one-letter alphabet at level k+1.
struct PotentialCascade {
  std::vector<PotentialPtr> levels;
  PotentialPtr top;

  // log c_n.
  double scalar_log_sum(std::size_t n) const;
  // Certified almost-additivity constant of log c_n.
  double qm_log_constant() const { return top->qm_log_constant(); }
};

PotentialCascade build_cascade(const PotentialPtr& phi, const FactorChain& chain,
                               const WeightVector& a, PushMode mode = PushMode::fast);

// log phi^a(I) = (1/A_1) log phi^(0)(I) + sum_{i=1}^{k-1} (1/A_{i+1} - 1/A_i) log phi^(i)(tau_i I).
class WeightedPotential final : public CylinderPotential {
 public:
  WeightedPotential(std::vector<PotentialPtr> pushed, FactorChain chain, WeightVector a);

  PotentialRepr repr() const override { return PotentialRepr::weighted; }
  double log_weight(std::span<const Symbol> word) const override;

 private:
  std::vector<PotentialPtr> pushed_;
  FactorChain chain_;
  std::vector<double> coefficients_;
};

PotentialPtr weighted_potential(const std::vector<PotentialPtr>& pushed, const FactorChain& chain,
                                const WeightVector& a);

// sum_i q_i ps_i, written at the largest depth among the inputs.
FiniteDepthPotential linear_combination(std::span<const FiniteDepthPotential> ps,
                                        std::span<const double> q);

std::size_t checked_power(std::size_t base, std::size_t exponent);

}  // namespace wthermo
