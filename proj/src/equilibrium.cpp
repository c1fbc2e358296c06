#include "wthermo/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wthermo/error.hpp"
#include "wthermo/log_sum.hpp"

namespace wthermo {

namespace {

constexpr double kStochasticTol = 1e-10;

void check_probability_vector(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw ModelError(std::string(what) + " is empty");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ModelError(std::string(what) + " has negative entries");
    total += v;
  }
  if (std::abs(total - 1.0) > kStochasticTol) throw ModelError(std::string(what) + " does not sum to 1");
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

double shannon(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h -= xlogx(v);
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Comparison measures

InvariantMeasureSpec::InvariantMeasureSpec(Kind kind, std::vector<double> initial,
                                           std::vector<std::vector<double>> transition)
    : kind_(kind), initial_(std::move(initial)), transition_(std::move(transition)) {}

InvariantMeasureSpec InvariantMeasureSpec::bernoulli(std::vector<double> p) {
  check_probability_vector(p, "bernoulli weights");
  std::vector<std::vector<double>> rows(p.size(), p);
  return InvariantMeasureSpec(Kind::bernoulli, std::move(p), std::move(rows));
}

InvariantMeasureSpec InvariantMeasureSpec::markov(std::vector<double> initial,
                                                  std::vector<std::vector<double>> transition) {
  check_probability_vector(initial, "markov initial distribution");
  if (transition.size() != initial.size()) throw ModelError("transition matrix has the wrong size");
  for (const auto& row : transition) {
    if (row.size() != initial.size()) throw ModelError("transition matrix is not square");
    check_probability_vector(row, "transition row");
  }
  for (std::size_t t = 0; t < initial.size(); ++t) {
    double flow = 0.0;
    for (std::size_t s = 0; s < initial.size(); ++s) flow += initial[s] * transition[s][t];
    if (std::abs(flow - initial[t]) > kStochasticTol)
      throw ModelError("markov initial distribution is not stationary for its transition matrix");
  }
  return InvariantMeasureSpec(Kind::markov, std::move(initial), std::move(transition));
}

double InvariantMeasureSpec::log_mass(std::span<const Symbol> w) const {
  if (w.empty()) return 0.0;
  for (Symbol s : w)
    if (s >= alphabet_size()) throw ModelError("symbol out of range for measure");
  double total = std::log(initial_[w[0]]);
  for (std::size_t j = 1; j < w.size(); ++j) total += std::log(transition_[w[j - 1]][w[j]]);
  return total;
}

std::vector<double> InvariantMeasureSpec::block_marginals(std::size_t n) const {
  if (n == 0) throw ModelError("block length must be >= 1");
  std::vector<double> out(initial_);
  const std::size_t alphabet = alphabet_size();
  for (std::size_t len = 1; len < n; ++len) {
    std::vector<double> next(out.size() * alphabet);
    for (std::size_t b = 0; b < out.size(); ++b)
      for (std::size_t s = 0; s < alphabet; ++s) next[b * alphabet + s] = out[b] * transition_[b % alphabet][s];
    out.swap(next);
  }
  return out;
}

double InvariantMeasureSpec::expectation(const FiniteDepthPotential& phi) const {
  if (phi.alphabet_size() != alphabet_size()) throw ModelError("potential alphabet mismatch");
  const auto p = block_marginals(static_cast<std::size_t>(phi.depth()));
  double total = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) total += p[b] * phi.g_at(b);
  return total;
}

double InvariantMeasureSpec::entropy() const {
  if (kind_ == Kind::bernoulli) return shannon(initial_);
  double h = 0.0;
  for (std::size_t s = 0; s < alphabet_size(); ++s) h += initial_[s] * shannon(transition_[s]);
  return h;
}

// ---------------------------------------------------------------------------
// Entropies

namespace {

// Block entropies H(Y^t), t = 1..depth, for the image process started from
// the (sub-probability) vector `start` over hidden states.
void block_entropies(const InvariantMeasureSpec& eta, std::span<const Symbol> map,
                     std::size_t image_alphabet, const std::vector<double>& start, std::size_t depth,
                     std::vector<double>& H) {
  const std::size_t states = eta.alphabet_size();
  const auto& P = eta.transition();
  std::vector<std::vector<double>> alpha(depth + 1, std::vector<double>(states));

  auto descend = [&](auto&& self, std::size_t t) -> void {
    for (std::size_t y = 0; y < image_alphabet; ++y) {
      auto& next = alpha[t + 1];
      double mass = 0.0;
      for (std::size_t x = 0; x < states; ++x) {
        double v = 0.0;
        if (map[x] == y) {
          if (t == 0) {
            v = start[x];
          } else {
            for (std::size_t u = 0; u < states; ++u) v += alpha[t][u] * P[u][x];
          }
        }
        next[x] = v;
        mass += v;
      }
      if (mass <= 0.0) continue;
      H[t + 1] -= xlogx(mass);
      if (t + 1 < depth) self(self, t + 1);
    }
  };
  descend(descend, 0);
}

}  // namespace

EntropyBracket hidden_markov_entropy(const InvariantMeasureSpec& eta, std::span<const Symbol> symbol_map,
                                     std::size_t image_alphabet, const EntropyOptions& options) {
  const std::size_t states = eta.alphabet_size();
  if (symbol_map.size() != states) throw ModelError("symbol map is not total on the measure alphabet");
  for (Symbol y : symbol_map)
    if (y >= image_alphabet) throw ModelError("symbol map leaves the image alphabet");

  std::size_t depth = 1;
  while (depth < options.max_block &&
         std::pow(static_cast<double>(image_alphabet), static_cast<double>(depth + 1)) *
                 static_cast<double>(states + 1) <=
             static_cast<double>(options.word_budget))
    ++depth;

  std::vector<double> H(depth + 1, 0.0);
  block_entropies(eta, symbol_map, image_alphabet, eta.initial(), depth, H);

  // H(Y^t | X_1) = sum_x pi(x) H(Y^t | X_1 = x).
  std::vector<double> Hc(depth + 1, 0.0);
  for (std::size_t x0 = 0; x0 < states; ++x0) {
    const double weight = eta.initial()[x0];
    if (weight <= 0.0) continue;
    std::vector<double> start(states, 0.0);
    start[x0] = 1.0;
    std::vector<double> Hx(depth + 1, 0.0);
    block_entropies(eta, symbol_map, image_alphabet, start, depth, Hx);
    for (std::size_t t = 0; t <= depth; ++t) Hc[t] += weight * Hx[t];
  }

  EntropyBracket out;
  out.hi = H[depth] - H[depth - 1];
  out.lo = std::min(out.hi, Hc[depth] - Hc[depth - 1]);
  out.lo = std::max(out.lo, 0.0);
  out.value = 0.5 * (out.lo + out.hi);
  return out;
}

EntropyBracket weighted_entropy(const InvariantMeasureSpec& eta, const FactorChain& chain,
                                const WeightVector& a, const EntropyOptions& options) {
  if (a.size() != chain.levels()) throw ModelError("weight vector and chain disagree on k");
  if (eta.alphabet_size() != chain.alphabet_size(1)) throw ModelError("measure alphabet mismatch");
  EntropyBracket total;
  const double h1 = eta.entropy();
  for (int i = 1; i <= chain.levels(); ++i) {
    const double weight = a.a(i);
    if (weight == 0.0) continue;
    EntropyBracket level;
    const std::size_t image_size = chain.alphabet_size(i);
    std::vector<Symbol> map(eta.alphabet_size());
    for (std::size_t s = 0; s < map.size(); ++s) map[s] = chain.tau(i - 1, static_cast<Symbol>(s));
    std::vector<bool> seen(image_size, false);
    bool injective = true;
    for (Symbol y : map) {
      if (seen[y]) injective = false;
      seen[y] = true;
    }

    if (injective) {
      level = {h1, h1, h1};
    } else if (eta.kind() == InvariantMeasureSpec::Kind::bernoulli || image_size == 1) {
      std::vector<double> pushed(image_size, 0.0);
      for (std::size_t s = 0; s < map.size(); ++s) pushed[map[s]] += eta.initial()[s];
      const double h = shannon(pushed);
      level = {h, h, h};
    } else {
      level = hidden_markov_entropy(eta, map, image_size, options);
    }
    total.value += weight * level.value;
    total.lo += weight * level.lo;
    total.hi += weight * level.hi;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Weighted Gibbs measures

std::string to_string(GibbsNormalization mode) {
  return mode == GibbsNormalization::exact_depth1 ? "exact_depth1" : "gibbs_ratio";
}

WeightedGibbsMeasure::WeightedGibbsMeasure(FiniteDepthPotential phi, FactorChain chain, WeightVector a,
                                           const PressureOptions& options)
    : phi_(std::move(phi)),
      chain_(std::move(chain)),
      a_(std::move(a)),
      mode_(phi_.is_depth1() ? GibbsNormalization::exact_depth1 : GibbsNormalization::gibbs_ratio) {
  PressureOptions opts = options;
  opts.force_enumeration = false;
  pressure_ = wthermo::pressure(phi_, chain_, a_, opts);
  cascade_ = build_cascade(std::make_shared<FiniteDepthPotential>(phi_), chain_, a_, PushMode::fast);
  weighted_ = weighted_potential(cascade_.levels, chain_, a_);
  if (mode_ == GibbsNormalization::exact_depth1) {
    const auto d1 = depth1_cascade(phi_, chain_, a_);
    for (int i = 1; i <= chain_.levels(); ++i) level_logp_.push_back(d1.level_log_probabilities(chain_, a_, i));
  }
}

void WeightedGibbsMeasure::require_exact(const char* what) const {
  if (mode_ != GibbsNormalization::exact_depth1)
    throw ModelError(std::string(what) + " needs an exact (depth-1) equilibrium measure");
}

std::vector<double> WeightedGibbsMeasure::level_log_probabilities(int level) const {
  require_exact("level probabilities");
  if (level < 1 || level > chain_.levels()) throw ModelError("level out of range");
  return level_logp_[static_cast<std::size_t>(level - 1)];
}

InvariantMeasureSpec WeightedGibbsMeasure::as_bernoulli() const {
  require_exact("as_bernoulli");
  std::vector<double> p;
  for (double lp : level_logp_[0]) p.push_back(std::exp(lp));
  double total = 0.0;
  for (double v : p) total += v;
  for (auto& v : p) v /= total;
  return InvariantMeasureSpec::bernoulli(std::move(p));
}

LogMass WeightedGibbsMeasure::cylinder_mass(const Word& I) const {
  if (I.level != 1) throw ModelError("cylinder masses are taken on level-1 words");
  const double n = static_cast<double>(I.size());
  const double Ak = a_.partial(chain_.levels());
  LogMass out;
  out.value = -n * pressure_.estimate / Ak + weighted_->eval(I);
  if (mode_ == GibbsNormalization::gibbs_ratio)
    out.log_ratio_bound = weighted_->qm_log_constant() + n * pressure_.width() / Ak;
  return out;
}

LogMass WeightedGibbsMeasure::marginal_mass(int level, const Word& J) const {
  const int k = chain_.levels();
  if (level < 1 || level > k) throw ModelError("marginal level out of range");
  if (J.level != level) throw ModelError("marginal word level mismatch");
  if (level == 1) return cylinder_mass(J);
  chain_.check_word(J);
  const double n = static_cast<double>(J.size());
  const double Ak = a_.partial(k);
  const auto& phis = cascade_.levels;
  double value = -n * pressure_.estimate / Ak +
                 phis[static_cast<std::size_t>(level - 1)]->eval(J) / a_.partial(level);
  double coef_sum = 1.0 / a_.partial(level);
  Word image = J;
  for (int j = level; j < k; ++j) {
    image = chain_.project_word(image);
    const double coef = 1.0 / a_.partial(j + 1) - 1.0 / a_.partial(j);
    if (coef != 0.0) value += coef * phis[static_cast<std::size_t>(j)]->eval(image);
    coef_sum += std::abs(coef);
  }
  LogMass out{value, 0.0};
  if (mode_ == GibbsNormalization::gibbs_ratio)
    out.log_ratio_bound = phi_.qm_log_constant() * coef_sum + n * pressure_.width() / Ak;
  return out;
}

LogMass WeightedGibbsMeasure::ball_mass(const Word& x_prefix, std::size_t n) const {
  const int k = chain_.levels();
  if (n == 0) throw ModelError("ball radius exponent must be >= 1");
  if (x_prefix.level != 1) throw ModelError("ball centre must be a level-1 word");
  const std::size_t lk = ell(n, k, a_);
  if (x_prefix.size() < lk) throw ModelError("ball centre prefix shorter than l_k(n) = " + std::to_string(lk));
  chain_.check_word(x_prefix);

  const auto& phis = cascade_.levels;
  const double Ak = a_.partial(k);
  // Exponent -l_k(n) P / A_k is the exact normalisation for product measures;
  // it differs from -n P / a_1 by less than P / A_k.
  double value = -static_cast<double>(lk) * pressure_.estimate / Ak +
                 phis[0]->eval(x_prefix.prefix(n)) / a_.partial(1);
  double coef_sum = 1.0 / a_.partial(1);
  for (int j = 1; j < k; ++j) {
    const std::size_t lj = ell(n, j, a_), lj1 = ell(n, j + 1, a_);
    const double A_j = a_.partial(j), A_j1 = a_.partial(j + 1);
    if (lj == lj1 && A_j == A_j1) continue;
    const auto& p = phis[static_cast<std::size_t>(j)];
    value += p->eval(chain_.tau_word(j, x_prefix.prefix(lj1))) / A_j1 -
             p->eval(chain_.tau_word(j, x_prefix.prefix(lj))) / A_j;
    coef_sum += 1.0 / A_j1 + 1.0 / A_j;
  }
  LogMass out{value, 0.0};
  if (mode_ == GibbsNormalization::gibbs_ratio)
    out.log_ratio_bound = phi_.qm_log_constant() * coef_sum + static_cast<double>(lk) * pressure_.width() / Ak;
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

void for_each_word(int level, std::size_t alphabet, std::size_t n_max,
                   const std::function<void(const Word&)>& f) {
  for (std::size_t n = 1; n <= n_max; ++n) {
    Word w{level, std::vector<Symbol>(n, 0)};
    const std::size_t count = checked_power(alphabet, n);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rest = idx;
      for (std::size_t j = n; j-- > 0;) {
        w.symbols[j] = static_cast<Symbol>(rest % alphabet);
        rest /= alphabet;
      }
      f(w);
    }
  }
}

QuasiBernoulliReport quasi_bernoulli_diagnostic(const std::function<double(const Word&)>& log_mass,
                                                std::size_t alphabet, std::size_t n_max) {
  std::vector<Word> words;
  std::vector<double> masses;
  for_each_word(1, alphabet, n_max, [&](const Word& w) {
    words.push_back(w);
    masses.push_back(log_mass(w));
  });
  QuasiBernoulliReport report;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = 0; j < words.size(); ++j) {
      Word joined = words[i];
      joined.symbols.insert(joined.symbols.end(), words[j].symbols.begin(), words[j].symbols.end());
      const double whole = log_mass(joined);
      if (!std::isfinite(whole) || !std::isfinite(masses[i]) || !std::isfinite(masses[j])) {
        report.quasi_bernoulli = false;
        report.log_constant = std::numeric_limits<double>::infinity();
        return report;
      }
      report.log_constant = std::max(report.log_constant, std::abs(whole - masses[i] - masses[j]));
    }
  }
  return report;
}

QuasiBernoulliReport quasi_bernoulli_diagnostic(const WeightedGibbsMeasure& mu, std::size_t n_max) {
  return quasi_bernoulli_diagnostic([&](const Word& w) { return mu.cylinder_mass(w).value; },
                                    mu.chain().alphabet_size(1), n_max);
}

QuasiBernoulliReport quasi_bernoulli_diagnostic(const InvariantMeasureSpec& eta, std::size_t n_max) {
  return quasi_bernoulli_diagnostic([&](const Word& w) { return eta.log_mass(w); }, eta.alphabet_size(),
                                    n_max);
}

double product_relation_check(const WeightedGibbsMeasure& mu, std::size_t n_max) {
  const auto& chain = mu.chain();
  if (chain.levels() != 2) throw ModelError("the two-level product relation needs k = 2");
  const double a = mu.weights().a(1), b = mu.weights().a(2);
  const double P = mu.pressure().estimate;
  double worst = 0.0;
  for_each_word(1, chain.alphabet_size(1), n_max, [&](const Word& I) {
    const double n = static_cast<double>(I.size());
    const double lhs = a * mu.cylinder_mass(I).value + b * mu.marginal_mass(2, chain.project_word(I)).value;
    const double dev = std::abs(lhs - mu.potential().eval(I) + n * P);
    worst = std::max(worst, dev);
  });
  return worst;
}

}  // namespace wthermo
