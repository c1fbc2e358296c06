#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wthermo {

// Dense symbol code, 0..|A_i|-1 at its level.
using Symbol = std::uint16_t;

// A finite word over the alphabet of one level (levels are numbered 1..k).
struct Word {
  int level = 1;
  std::vector<Symbol> symbols;

  std::size_t size() const { return symbols.size(); }
  Word prefix(std::size_t n) const;
  bool operator==(const Word&) const = default;
};

// Parses "0120" style words (one decimal digit per symbol).
Word make_word(int level, const std::string& digits);
std::string to_string(const Word& w);

// Chain of full shifts X_1 -> X_2 -> ... -> X_k linked by one-block factor
// maps pi_i : A_i -> A_{i+1}. tau_i = pi_i o ... o pi_1 (tau_0 = identity)
// sends level-1 symbols to level i+1.
class FactorChain {
 public:
  FactorChain(std::vector<std::size_t> alphabet_sizes,
              std::vector<std::vector<Symbol>> factor_maps);

  // Single full shift on `alphabet` symbols.
  static FactorChain single(std::size_t alphabet);

  int levels() const { return static_cast<int>(alphabet_sizes_.size()); }
  std::size_t alphabet_size(int level) const;

  // pi_level applied to a symbol of `level` (1 <= level < k).
  Symbol project(int level, Symbol s) const;
  // tau_i applied to a level-1 symbol (0 <= i < k).
  Symbol tau(int i, Symbol s) const;
  // Preimages under pi_level of each symbol of level+1, in increasing order.
  const std::vector<std::vector<Symbol>>& fibers(int level) const;
  const std::vector<Symbol>& factor_map(int level) const;

  Word tau_word(int i, const Word& w) const;
  // pi applied symbol-wise to a word of level < k.
  Word project_word(const Word& w) const;

  void check_word(const Word& w) const;

 private:
  std::vector<std::size_t> alphabet_sizes_;
  std::vector<std::vector<Symbol>> maps_;
  std::vector<std::vector<std::vector<Symbol>>> fibers_;
  std::vector<std::vector<Symbol>> tau_;  // tau_[i][s], i = 0..k-1
};

// Exponents a = (a_1..a_k) with a_1 > 0, a_i >= 0, and their partial sums.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> a);

  // a_1 = 1/log m_1, a_i = 1/log m_i - 1/log m_{i-1}: the weights for which
  // (X, d_a) is a Bedford-McMullen type carpet with contractions 1/m_i.
  static WeightVector carpet(std::span<const double> bases);

  int size() const { return static_cast<int>(a_.size()); }
  double a(int i) const { return a_.at(static_cast<std::size_t>(i - 1)); }
  // A_i = a_1 + ... + a_i, with A_0 = 0.
  double partial(int i) const;
  const std::vector<double>& values() const { return a_; }
  WeightVector scaled(double factor) const;

 private:
  std::vector<double> a_;
  std::vector<double> partial_;
};

// l_i(n) = min{p : p >= A_i n / a_1}, l_0(n) = 0.
std::size_t ell(std::size_t n, int i, const WeightVector& a);

// Closed ball B(x, e^{-n/a_1}) described by prefix constraints per level.
struct BallShape {
  std::size_t n = 0;
  std::vector<Word> constraints;  // constraints[i-1] is the level-i prefix

  bool contains(const FactorChain& chain, const Word& y) const;
};

BallShape ball_shape(const FactorChain& chain, const WeightVector& a,
                     const Word& x_prefix, std::size_t n);

// d_a on finite level-1 words of equal length, with agreement through the
// whole length counted as |x ^ y| = L.
double metric_d_a(const FactorChain& chain, const WeightVector& a, const Word& x,
                  const Word& y);

}  // namespace wthermo
