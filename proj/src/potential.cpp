#include "wthermo/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wthermo/error.hpp"
#include "wthermo/log_sum.hpp"

namespace wthermo {

std::string to_string(PotentialRepr repr) {
  switch (repr) {
    case PotentialRepr::finite_depth:
      return "finite_depth";
    case PotentialRepr::matrix_cocycle:
      return "matrix_cocycle";
    case PotentialRepr::generic_pushed:
      return "generic_pushed";
    case PotentialRepr::weighted:
      return "weighted";
  }
  return "unknown";
}

std::size_t checked_power(std::size_t base, std::size_t exponent) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && out > std::numeric_limits<std::size_t>::max() / base)
      throw BudgetError("word count overflows");
    out *= base;
  }
  return out;
}

double CylinderPotential::eval(const Word& w) const {
  if (w.level != level_)
    throw ModelError("word level " + std::to_string(w.level) + " does not match potential level " +
                     std::to_string(level_));
  for (Symbol s : w.symbols)
    if (s >= alphabet_) throw ModelError("symbol out of range for potential alphabet");
  if (w.symbols.empty()) throw ModelError("cylinder weights need a non-empty word");
  return log_weight(w.symbols);
}

// ---------------------------------------------------------------------------
// Finite depth

namespace {

std::size_t block_index(std::span<const Symbol> block, std::size_t alphabet) {
  std::size_t idx = 0;
  for (Symbol s : block) idx = idx * alphabet + s;
  return idx;
}

// Sum over r = 1..depth-1 of the largest oscillation of g among blocks that
// share their first r symbols.
double distortion_constant(const std::vector<double>& table, std::size_t alphabet, int depth) {
  double total = 0.0;
  for (int r = 1; r < depth; ++r) {
    const std::size_t group = checked_power(alphabet, static_cast<std::size_t>(depth - r));
    double worst = 0.0;
    for (std::size_t start = 0; start < table.size(); start += group) {
      const auto [lo, hi] = std::minmax_element(table.begin() + static_cast<std::ptrdiff_t>(start),
                                                table.begin() + static_cast<std::ptrdiff_t>(start + group));
      worst = std::max(worst, *hi - *lo);
    }
    total += worst;
  }
  return total;
}

double finite_depth_qm(std::size_t alphabet, int depth, const std::vector<double>& table) {
  if (depth < 1) throw ModelError("potential depth must be >= 1");
  if (table.size() != checked_power(alphabet, static_cast<std::size_t>(depth)))
    throw ModelError("log_table size must be |A|^depth");
  for (double v : table)
    if (!std::isfinite(v)) throw ModelError("log_table entries must be finite");
  return distortion_constant(table, alphabet, depth);
}

}  // namespace

FiniteDepthPotential::FiniteDepthPotential(int level, std::size_t alphabet, int depth,
                                           std::vector<double> log_table)
    : CylinderPotential(level, alphabet, finite_depth_qm(alphabet, depth, log_table)),
      depth_(depth),
      table_(std::move(log_table)) {
  const std::size_t m1 = static_cast<std::size_t>(depth_ - 1);
  const std::size_t states = checked_power(alphabet, m1);
  tail_sup_.assign(states, 0.0);
  if (depth_ == 1) return;

  // tail_sup[u] = max_t sum_{r=0}^{m-2} g((u t)[r .. r+m)), u and t of length m-1.
  std::vector<Symbol> buf(2 * m1);
  for (std::size_t u = 0; u < states; ++u) {
    std::size_t rest = u;
    for (std::size_t j = m1; j-- > 0;) {
      buf[j] = static_cast<Symbol>(rest % alphabet);
      rest /= alphabet;
    }
    double best = kNegInf;
    for (std::size_t t = 0; t < states; ++t) {
      rest = t;
      for (std::size_t j = m1; j-- > 0;) {
        buf[m1 + j] = static_cast<Symbol>(rest % alphabet);
        rest /= alphabet;
      }
      double sum = 0.0;
      for (std::size_t r = 0; r < m1; ++r)
        sum += table_[block_index(std::span<const Symbol>(buf).subspan(r, m1 + 1), alphabet)];
      best = std::max(best, sum);
    }
    tail_sup_[u] = best;
  }
}

FiniteDepthPotential FiniteDepthPotential::zero(std::size_t alphabet, int level) {
  return FiniteDepthPotential(level, alphabet, 1, std::vector<double>(alphabet, 0.0));
}

FiniteDepthPotential FiniteDepthPotential::constant(std::size_t alphabet, double value, int level) {
  return FiniteDepthPotential(level, alphabet, 1, std::vector<double>(alphabet, value));
}

FiniteDepthPotential FiniteDepthPotential::block_indicator(std::size_t alphabet, const Word& block) {
  if (block.symbols.empty()) throw ModelError("indicator block must be non-empty");
  const int depth = static_cast<int>(block.size());
  std::vector<double> table(checked_power(alphabet, block.size()), 0.0);
  for (Symbol s : block.symbols)
    if (s >= alphabet) throw ModelError("indicator block symbol out of range");
  table[block_index(block.symbols, alphabet)] = 1.0;
  return FiniteDepthPotential(block.level, alphabet, depth, std::move(table));
}

double FiniteDepthPotential::g(std::span<const Symbol> block) const {
  if (block.size() != static_cast<std::size_t>(depth_)) throw ModelError("block length != depth");
  return table_[block_index(block, alphabet_size())];
}

double FiniteDepthPotential::table_min() const { return *std::min_element(table_.begin(), table_.end()); }
double FiniteDepthPotential::table_max() const { return *std::max_element(table_.begin(), table_.end()); }

double FiniteDepthPotential::log_weight(std::span<const Symbol> word) const {
  const std::size_t n = word.size();
  const std::size_t m = static_cast<std::size_t>(depth_);
  const std::size_t alphabet = alphabet_size();
  double total = 0.0;
  for (std::size_t j = 0; j + m <= n; ++j) total += table_[block_index(word.subspan(j, m), alphabet)];
  if (m == 1) return total;

  if (n >= m - 1) return total + tail_sup_[block_index(word.subspan(n - (m - 1)), alphabet)];

  // Word shorter than the state length: every term straddles the end.
  const std::size_t m1 = m - 1;
  std::vector<Symbol> buf(n + m1);
  std::copy(word.begin(), word.end(), buf.begin());
  double best = kNegInf;
  const std::size_t completions = checked_power(alphabet, m1);
  for (std::size_t t = 0; t < completions; ++t) {
    std::size_t rest = t;
    for (std::size_t j = m1; j-- > 0;) {
      buf[n + j] = static_cast<Symbol>(rest % alphabet);
      rest /= alphabet;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += table_[block_index(std::span<const Symbol>(buf).subspan(j, m), alphabet)];
    best = std::max(best, sum);
  }
  return best;
}

double FiniteDepthPotential::birkhoff_sum(std::span<const Symbol> x, std::size_t n) const {
  const std::size_t m = static_cast<std::size_t>(depth_);
  if (x.size() < n + m - 1) throw ModelError("word too short for an exact Birkhoff sum");
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += table_[block_index(x.subspan(j, m), alphabet_size())];
  return total;
}

FiniteDepthPotential FiniteDepthPotential::broadcast(int depth) const {
  if (depth < depth_) throw ModelError("cannot broadcast to a smaller depth");
  if (depth == depth_) return *this;
  const std::size_t extra = checked_power(alphabet_size(), static_cast<std::size_t>(depth - depth_));
  std::vector<double> table(table_.size() * extra);
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = table_[i / extra];
  return FiniteDepthPotential(level(), alphabet_size(), depth, std::move(table));
}

FiniteDepthPotential FiniteDepthPotential::scaled(double factor) const {
  std::vector<double> table = table_;
  for (auto& v : table) v *= factor;
  return FiniteDepthPotential(level(), alphabet_size(), depth_, std::move(table));
}

double phi_of_cylinder(const FiniteDepthPotential& p, const Word& I) { return p.eval(I); }

// ---------------------------------------------------------------------------
// Pushes

namespace {

std::vector<std::vector<Symbol>> fibers_of(std::span<const Symbol> map, std::size_t source_alphabet,
                                          std::size_t target_alphabet) {
  if (map.size() != source_alphabet) throw ModelError("push map is not total on the source alphabet");
  std::vector<std::vector<Symbol>> fibers(target_alphabet);
  for (std::size_t s = 0; s < map.size(); ++s) {
    if (map[s] >= target_alphabet) throw ModelError("push map leaves the target alphabet");
    fibers[map[s]].push_back(static_cast<Symbol>(s));
  }
  for (const auto& f : fibers)
    if (f.empty()) throw ModelError("push map is not surjective");
  return fibers;
}

std::size_t fiber_count(const std::vector<std::vector<Symbol>>& fibers, std::span<const Symbol> word) {
  std::size_t count = 1;
  for (Symbol s : word) {
    const std::size_t f = fibers.at(s).size();
    if (count > std::numeric_limits<std::size_t>::max() / f) throw BudgetError("fiber too large to enumerate");
    count *= f;
  }
  return count;
}

// The idx-th preimage of `word` in lexicographic order of fiber positions.
void decode_preimage(const std::vector<std::vector<Symbol>>& fibers, std::span<const Symbol> word,
                     std::size_t idx, std::vector<Symbol>& out) {
  out.resize(word.size());
  for (std::size_t j = word.size(); j-- > 0;) {
    const auto& f = fibers[word[j]];
    out[j] = f[idx % f.size()];
    idx /= f.size();
  }
}

}  // namespace

MatrixCocyclePotential::MatrixCocyclePotential(std::shared_ptr<const FiniteDepthPotential> source,
                                               std::vector<Symbol> target_map,
                                               std::size_t target_alphabet, int target_level,
                                               double exponent)
    : CylinderPotential(target_level, target_alphabet, source->qm_log_constant()),
      source_(std::move(source)),
      fibers_(fibers_of(target_map, source_->alphabet_size(), target_alphabet)),
      exponent_(exponent) {
  if (!(exponent_ > 0.0)) throw ModelError("push exponent must be positive");
}

double MatrixCocyclePotential::log_weight(std::span<const Symbol> word) const {
  const std::size_t n = word.size();
  const std::size_t m1 = static_cast<std::size_t>(source_->depth() - 1);
  const std::size_t alphabet = source_->alphabet_size();
  const double c = 1.0 / exponent_;

  if (n < m1) {
    const std::size_t count = fiber_count(fibers_, word);
    std::vector<Symbol> pre;
    std::vector<double> terms(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
      decode_preimage(fibers_, word, idx, pre);
      terms[idx] = c * source_->log_weight(pre);
    }
    return exponent_ * log_sum_exp(terms);
  }

  const std::size_t states = source_->state_count();
  // Forward vector over the last m-1 symbols of partial preimages.
  std::vector<double> v(states, kNegInf);
  for (std::size_t u = 0; u < states; ++u) {
    std::size_t rest = u;
    bool ok = true;
    for (std::size_t j = m1; j-- > 0 && ok;) {
      const Symbol s = static_cast<Symbol>(rest % alphabet);
      rest /= alphabet;
      const auto& f = fibers_.at(word[j]);
      ok = std::binary_search(f.begin(), f.end(), s);
    }
    if (ok) v[u] = 0.0;
  }

  const std::size_t shift = states / (m1 == 0 ? states : alphabet);  // |A|^{m-2}, or 1 when m = 1
  std::vector<double> next(states);
  for (std::size_t t = m1; t < n; ++t) {
    std::fill(next.begin(), next.end(), kNegInf);
    const auto& f = fibers_.at(word[t]);
    for (std::size_t u = 0; u < states; ++u) {
      if (v[u] == kNegInf) continue;
      const std::size_t base = m1 == 0 ? 0 : (u % shift) * alphabet;
      for (Symbol s : f) {
        const std::size_t to = m1 == 0 ? 0 : base + s;
        next[to] = log_add(next[to], v[u] + c * source_->g_at(u * alphabet + s));
      }
    }
    v.swap(next);
  }

  double total = kNegInf;
  for (std::size_t u = 0; u < states; ++u)
    if (v[u] != kNegInf) total = log_add(total, v[u] + c * source_->tail_sup(u));
  return exponent_ * total;
}

PushedPotential::PushedPotential(PotentialPtr inner, std::vector<Symbol> target_map,
                                 std::size_t target_alphabet, int target_level, double exponent)
    : CylinderPotential(target_level, target_alphabet, inner->qm_log_constant()),
      inner_(std::move(inner)),
      fibers_(fibers_of(target_map, inner_->alphabet_size(), target_alphabet)),
      exponent_(exponent) {
  if (!(exponent_ > 0.0)) throw ModelError("push exponent must be positive");
}

double PushedPotential::log_weight(std::span<const Symbol> word) const {
  if (word.size() > kMemoMaxLength) return evaluate(word);
  std::string key(reinterpret_cast<const char*>(word.data()), word.size() * sizeof(Symbol));
  {
    std::shared_lock lock(memo_mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  const double value = evaluate(word);
  std::unique_lock lock(memo_mutex_);
  if (memo_.size() < kMemoMaxEntries) memo_[std::move(key)] = value;
  return value;
}

double PushedPotential::evaluate(std::span<const Symbol> word) const {
  const std::size_t count = fiber_count(fibers_, word);
  const double c = 1.0 / exponent_;
  const std::vector<Symbol> target(word.begin(), word.end());
  const double total = parallel_log_sum_exp(count, [&](std::size_t idx) {
    thread_local std::vector<Symbol> pre;
    decode_preimage(fibers_, target, idx, pre);
    return c * inner_->log_weight(pre);
  });
  return exponent_ * total;
}

PotentialPtr push_through(const PotentialPtr& p, std::span<const Symbol> target_map,
                          std::size_t target_alphabet, int target_level, double exponent,
                          PushMode mode) {
  if (!(exponent > 0.0)) throw ModelError("push exponent must be positive");
  std::vector<Symbol> map(target_map.begin(), target_map.end());
  if (auto fd = std::dynamic_pointer_cast<const FiniteDepthPotential>(p)) {
    if (fd->is_depth1() && mode == PushMode::fast) {
      // W_j = (sum_{s in fiber j} w_s^{1/A})^A, in logs.
      const auto fibers = fibers_of(map, fd->alphabet_size(), target_alphabet);
      std::vector<double> table(target_alphabet);
      for (std::size_t j = 0; j < target_alphabet; ++j) {
        std::vector<double> terms;
        for (Symbol s : fibers[j]) terms.push_back(fd->g_at(s) / exponent);
        table[j] = exponent * log_sum_exp(terms);
      }
      return std::make_shared<FiniteDepthPotential>(target_level, target_alphabet, 1, std::move(table));
    }
    return std::make_shared<MatrixCocyclePotential>(fd, std::move(map), target_alphabet, target_level,
                                                    exponent);
  }
  return std::make_shared<PushedPotential>(p, std::move(map), target_alphabet, target_level, exponent);
}

PotentialPtr theta_push(const PotentialPtr& p, const FactorChain& chain, const WeightVector& a,
                        PushMode mode) {
  const int i = p->level();
  if (i < 1 || i >= chain.levels()) throw ModelError("theta_i needs 1 <= i <= k-1");
  if (a.size() != chain.levels()) throw ModelError("weight vector and chain disagree on k");
  if (p->alphabet_size() != chain.alphabet_size(i)) throw ModelError("potential alphabet mismatch");
  return push_through(p, chain.factor_map(i), chain.alphabet_size(i + 1), i + 1, a.partial(i), mode);
}

double PotentialCascade::scalar_log_sum(std::size_t n) const {
  if (n == 0) throw ModelError("scalar sequence starts at n = 1");
  const std::vector<Symbol> zeros(n, 0);
  return top->log_weight(zeros);
}

PotentialCascade build_cascade(const PotentialPtr& phi, const FactorChain& chain,
                               const WeightVector& a, PushMode mode) {
  if (phi->level() != 1) throw ModelError("cascade starts from a level-1 potential");
  if (phi->alphabet_size() != chain.alphabet_size(1)) throw ModelError("potential alphabet mismatch");
  const int k = chain.levels();
  if (a.size() != k) throw ModelError("weight vector and chain disagree on k");
  PotentialCascade cascade;
  cascade.levels.push_back(phi);
  for (int i = 1; i < k; ++i) cascade.levels.push_back(theta_push(cascade.levels.back(), chain, a, mode));
  const std::vector<Symbol> to_point(chain.alphabet_size(k), 0);
  cascade.top = push_through(cascade.levels.back(), to_point, 1, k + 1, a.partial(k), mode);
  return cascade;
}

// ---------------------------------------------------------------------------
// Weighted potential

namespace {

double weighted_qm(const std::vector<PotentialPtr>& pushed, const WeightVector& a) {
  if (pushed.empty()) throw ModelError("weighted potential needs phi^(0)");
  const int k = a.size();
  return pushed.front()->qm_log_constant() * (2.0 / a.partial(1) - 1.0 / a.partial(k));
}

}  // namespace

WeightedPotential::WeightedPotential(std::vector<PotentialPtr> pushed, FactorChain chain,
                                     WeightVector a)
    : CylinderPotential(1, chain.alphabet_size(1), weighted_qm(pushed, a)),
      pushed_(std::move(pushed)),
      chain_(std::move(chain)) {
  const int k = chain_.levels();
  if (a.size() != k) throw ModelError("weight vector and chain disagree on k");
  if (static_cast<int>(pushed_.size()) != k)
    throw ModelError("weighted potential needs exactly k pushed potentials");
  for (int i = 0; i < k; ++i) {
    const auto& p = pushed_[static_cast<std::size_t>(i)];
    if (p->level() != i + 1 || p->alphabet_size() != chain_.alphabet_size(i + 1))
      throw ModelError("inconsistent chain of pushed potentials");
  }
  coefficients_.push_back(1.0 / a.partial(1));
  for (int i = 1; i < k; ++i) coefficients_.push_back(1.0 / a.partial(i + 1) - 1.0 / a.partial(i));
}

double WeightedPotential::log_weight(std::span<const Symbol> word) const {
  double total = coefficients_[0] * pushed_[0]->log_weight(word);
  std::vector<Symbol> image(word.size());
  for (std::size_t i = 1; i < pushed_.size(); ++i) {
    if (coefficients_[i] == 0.0) continue;
    for (std::size_t j = 0; j < word.size(); ++j) image[j] = chain_.tau(static_cast<int>(i), word[j]);
    total += coefficients_[i] * pushed_[i]->log_weight(image);
  }
  return total;
}

PotentialPtr weighted_potential(const std::vector<PotentialPtr>& pushed, const FactorChain& chain,
                                const WeightVector& a) {
  return std::make_shared<WeightedPotential>(pushed, chain, a);
}

FiniteDepthPotential linear_combination(std::span<const FiniteDepthPotential> ps,
                                        std::span<const double> q) {
  if (ps.empty()) throw ModelError("linear combination of no potentials");
  if (ps.size() != q.size()) throw ModelError("coefficient count does not match potential count");
  int depth = 1;
  for (const auto& p : ps) {
    if (p.level() != 1) throw ModelError("linear combinations are formed at level 1");
    if (p.alphabet_size() != ps.front().alphabet_size()) throw ModelError("potential alphabets differ");
    depth = std::max(depth, p.depth());
  }
  const std::size_t alphabet = ps.front().alphabet_size();
  std::vector<double> table(checked_power(alphabet, static_cast<std::size_t>(depth)), 0.0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& src = ps[i].log_table();
    const std::size_t extra = table.size() / src.size();
    for (std::size_t b = 0; b < table.size(); ++b) table[b] += q[i] * src[b / extra];
  }
  return FiniteDepthPotential(1, alphabet, depth, std::move(table));
}

}  // namespace wthermo
