#include "wthermo/shift_space.hpp"

#include <algorithm>
#include <cmath>

#include "wthermo/error.hpp"

namespace wthermo {

Word Word::prefix(std::size_t n) const {
  Word out{level, {}};
  out.symbols.assign(symbols.begin(),
                     symbols.begin() + static_cast<std::ptrdiff_t>(std::min(n, symbols.size())));
  return out;
}

Word make_word(int level, const std::string& digits) {
  Word w{level, {}};
  w.symbols.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '9') throw ModelError("word digits must be 0-9: " + digits);
    w.symbols.push_back(static_cast<Symbol>(c - '0'));
  }
  return w;
}

std::string to_string(const Word& w) {
  std::string out;
  bool wide = std::any_of(w.symbols.begin(), w.symbols.end(), [](Symbol s) { return s > 9; });
  for (std::size_t i = 0; i < w.symbols.size(); ++i) {
    if (wide && i > 0) out += '.';
    out += std::to_string(w.symbols[i]);
  }
  return out;
}

FactorChain::FactorChain(std::vector<std::size_t> alphabet_sizes,
                         std::vector<std::vector<Symbol>> factor_maps)
    : alphabet_sizes_(std::move(alphabet_sizes)), maps_(std::move(factor_maps)) {
  if (alphabet_sizes_.empty()) throw ModelError("factor chain needs at least one level");
  for (auto size : alphabet_sizes_)
    if (size < 1 || size > 65535) throw ModelError("alphabet sizes must be in 1..65535");
  if (maps_.size() + 1 != alphabet_sizes_.size())
    throw ModelError("need exactly k-1 factor maps for k alphabets");

  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const auto& map = maps_[i];
    if (map.size() != alphabet_sizes_[i])
      throw ModelError("factor map " + std::to_string(i + 1) + " is not total on its alphabet");
    std::vector<std::vector<Symbol>> fib(alphabet_sizes_[i + 1]);
    for (std::size_t s = 0; s < map.size(); ++s) {
      if (map[s] >= alphabet_sizes_[i + 1])
        throw ModelError("factor map " + std::to_string(i + 1) + " leaves the target alphabet");
      fib[map[s]].push_back(static_cast<Symbol>(s));
    }
    for (const auto& f : fib)
      if (f.empty())
        throw ModelError("factor map " + std::to_string(i + 1) + " is not surjective");
    fibers_.push_back(std::move(fib));
  }

  const std::size_t base = alphabet_sizes_[0];
  tau_.assign(alphabet_sizes_.size(), std::vector<Symbol>(base));
  for (std::size_t s = 0; s < base; ++s) tau_[0][s] = static_cast<Symbol>(s);
  for (std::size_t i = 1; i < alphabet_sizes_.size(); ++i)
    for (std::size_t s = 0; s < base; ++s) tau_[i][s] = maps_[i - 1][tau_[i - 1][s]];
}

FactorChain FactorChain::single(std::size_t alphabet) { return FactorChain({alphabet}, {}); }

std::size_t FactorChain::alphabet_size(int level) const {
  if (level < 1 || level > levels()) throw ModelError("level out of range");
  return alphabet_sizes_[static_cast<std::size_t>(level - 1)];
}

Symbol FactorChain::project(int level, Symbol s) const {
  return factor_map(level).at(s);
}

Symbol FactorChain::tau(int i, Symbol s) const {
  return tau_.at(static_cast<std::size_t>(i)).at(s);
}

const std::vector<std::vector<Symbol>>& FactorChain::fibers(int level) const {
  if (level < 1 || level >= levels()) throw ModelError("no factor map at this level");
  return fibers_[static_cast<std::size_t>(level - 1)];
}

const std::vector<Symbol>& FactorChain::factor_map(int level) const {
  if (level < 1 || level >= levels()) throw ModelError("no factor map at this level");
  return maps_[static_cast<std::size_t>(level - 1)];
}

void FactorChain::check_word(const Word& w) const {
  const std::size_t size = alphabet_size(w.level);
  for (Symbol s : w.symbols)
    if (s >= size) throw ModelError("symbol out of range for level " + std::to_string(w.level));
}

Word FactorChain::tau_word(int i, const Word& w) const {
  if (w.level != 1) throw ModelError("tau expects a level-1 word");
  if (i < 0 || i >= levels()) throw ModelError("tau index out of range");
  check_word(w);
  Word out{i + 1, {}};
  out.symbols.reserve(w.size());
  for (Symbol s : w.symbols) out.symbols.push_back(tau(i, s));
  return out;
}

Word FactorChain::project_word(const Word& w) const {
  check_word(w);
  const auto& map = factor_map(w.level);
  Word out{w.level + 1, {}};
  out.symbols.reserve(w.size());
  for (Symbol s : w.symbols) out.symbols.push_back(map[s]);
  return out;
}

WeightVector::WeightVector(std::vector<double> a) : a_(std::move(a)) {
  if (a_.empty()) throw ModelError("weight vector is empty");
  if (!(a_[0] > 0.0) || !std::isfinite(a_[0])) throw ModelError("a_1 must be positive");
  partial_.assign(a_.size() + 1, 0.0);
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!(a_[i] >= 0.0) || !std::isfinite(a_[i]))
      throw ModelError("weights a_i must be finite and non-negative");
    partial_[i + 1] = partial_[i] + a_[i];
  }
}

WeightVector WeightVector::carpet(std::span<const double> bases) {
  std::vector<double> a;
  double prev = 0.0;
  for (double m : bases) {
    if (!(m > 1.0)) throw ModelError("carpet bases must exceed 1");
    const double inv = 1.0 / std::log(m);
    a.push_back(inv - prev);
    prev = inv;
  }
  return WeightVector(std::move(a));
}

double WeightVector::partial(int i) const { return partial_.at(static_cast<std::size_t>(i)); }

WeightVector WeightVector::scaled(double factor) const {
  std::vector<double> b = a_;
  for (auto& v : b) v *= factor;
  return WeightVector(std::move(b));
}

std::size_t ell(std::size_t n, int i, const WeightVector& a) {
  if (i < 0 || i > a.size()) throw ModelError("ell level out of range");
  if (i == 0) return 0;
  if (i == 1) return n;
  const double x = a.partial(i) * static_cast<double>(n) / a.a(1);
  // Ratios such as (1+1)/1 must not round up to the next integer.
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, x)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(x));
}

BallShape ball_shape(const FactorChain& chain, const WeightVector& a, const Word& x_prefix,
                     std::size_t n) {
  const int k = chain.levels();
  if (a.size() != k) throw ModelError("weight vector and chain disagree on k");
  if (x_prefix.level != 1) throw ModelError("ball centre must be a level-1 word");
  const std::size_t need = ell(n, k, a);
  if (x_prefix.size() < need)
    throw ModelError("ball centre prefix shorter than l_k(n) = " + std::to_string(need));
  BallShape shape{n, {}};
  for (int i = 1; i <= k; ++i)
    shape.constraints.push_back(chain.tau_word(i - 1, x_prefix.prefix(ell(n, i, a))));
  return shape;
}

bool BallShape::contains(const FactorChain& chain, const Word& y) const {
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    if (y.size() < c.size()) return false;
    for (std::size_t j = 0; j < c.size(); ++j)
      if (chain.tau(static_cast<int>(i), y.symbols[j]) != c.symbols[j]) return false;
  }
  return true;
}

double metric_d_a(const FactorChain& chain, const WeightVector& a, const Word& x, const Word& y) {
  if (x.level != 1 || y.level != 1) throw ModelError("d_a is defined on level-1 words");
  if (x.size() != y.size()) throw ModelError("d_a needs words of equal length");
  chain.check_word(x);
  chain.check_word(y);
  double d = 0.0;
  for (int i = 1; i <= chain.levels(); ++i) {
    std::size_t agree = 0;
    while (agree < x.size() && chain.tau(i - 1, x.symbols[agree]) == chain.tau(i - 1, y.symbols[agree]))
      ++agree;
    d = std::max(d, std::exp(-static_cast<double>(agree) / a.partial(i)));
  }
  return d;
}

}  // namespace wthermo
