#include "wthermo/marginal_projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wthermo/error.hpp"

namespace wthermo {

namespace {

constexpr double kConsistencyTol = 1e-10;

std::vector<FiniteDepthPotential> indicators(std::size_t alphabet, std::size_t n) {
  std::vector<FiniteDepthPotential> out;
  const std::size_t count = checked_power(alphabet, n);
  out.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    Word block{1, std::vector<Symbol>(n)};
    std::size_t rest = idx;
    for (std::size_t j = n; j-- > 0;) {
      block.symbols[j] = static_cast<Symbol>(rest % alphabet);
      rest /= alphabet;
    }
    out.push_back(FiniteDepthPotential::block_indicator(alphabet, block));
  }
  return out;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double t = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) t += x[i] * y[i];
  return t;
}

double sup_norm(const std::vector<double>& x) {
  double t = 0.0;
  for (double v : x) t = std::max(t, std::abs(v));
  return t;
}

void remove_mean(std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (auto& v : x) v -= mean;
}

}  // namespace

void validate_constraint(const MarginalConstraint& c, std::size_t alphabet) {
  if (c.n < 1) throw ConstraintError("constraint block length must be >= 1");
  const std::size_t count = checked_power(alphabet, c.n);
  if (c.p.size() != count)
    throw ConstraintError("constraint needs |A_1|^n = " + std::to_string(count) + " probabilities");
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(c.p[i]) || c.p[i] < 0.0) throw ConstraintError("constraint has negative entries");
    if (c.p[i] == 0.0)
      throw ConstraintError("constraint entry " + std::to_string(i) +
                            " is zero: boundary constraints are not supported, perturb p into the interior");
    total += c.p[i];
  }
  if (std::abs(total - 1.0) > kConsistencyTol) throw ConstraintError("constraint does not sum to 1");
  if (c.n == 1) return;
  // sum_e p(e u) == sum_e p(u e) for every (n-1)-word u.
  const std::size_t inner = count / alphabet;
  for (std::size_t u = 0; u < inner; ++u) {
    double left = 0.0, right = 0.0;
    for (std::size_t e = 0; e < alphabet; ++e) {
      left += c.p[e * inner + u];
      right += c.p[u * alphabet + e];
    }
    if (std::abs(left - right) > kConsistencyTol) {
      std::ostringstream msg;
      msg << "constraint is not shift-consistent (deviation " << std::abs(left - right) << ")";
      throw ConstraintError(msg.str());
    }
  }
}

ProjectionResult project(const MarginalConstraint& c, const FactorChain& chain, const WeightVector& a,
                         const ProjectionOptions& options) {
  const std::size_t alphabet = chain.alphabet_size(1);
  validate_constraint(c, alphabet);
  const auto phis = indicators(alphabet, c.n);
  const std::size_t d = phis.size();

  // G(q) and its gradient (equilibrium marginals - p).
  auto evaluate = [&](const std::vector<double>& q, std::vector<double>* marginals) {
    if (!marginals) {
      const auto e = pressure(linear_combination(phis, q), chain, a, options.pressure.pressure);
      return e.estimate - dot(c.p, q);
    }
    const auto s = pressure_function(phis, chain, a, q, options.pressure);
    *marginals = s.gradient;
    return s.value - dot(c.p, q);
  };

  std::vector<double> q(d, 0.0), marg;
  double G = evaluate(q, &marg);
  auto gradient_of = [&](const std::vector<double>& m) {
    std::vector<double> g(d);
    for (std::size_t i = 0; i < d; ++i) g[i] = m[i] - c.p[i];
    return g;
  };
  std::vector<double> raw = gradient_of(marg);
  std::vector<double> g = raw;
  remove_mean(g);

  std::vector<double> H(d * d, 0.0);
  auto reset = [&] {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) H[i * d + i] = 1.0;
  };
  reset();

  std::size_t iter = 0;
  for (; iter < options.iteration_cap; ++iter) {
    if (sup_norm(raw) <= options.tol) break;
    std::vector<double> dir(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) dir[i] -= H[i * d + j] * g[j];
    remove_mean(dir);
    double slope = dot(g, dir);
    if (slope >= 0.0) {
      reset();
      dir = g;
      for (auto& v : dir) v = -v;
      slope = dot(g, dir);
    }

    double step = 1.0;
    std::vector<double> q_new(d), marg_new;
    double G_new = 0.0;
    int halvings = 0;
    bool have_marginals = false;
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(G));
    for (;; ++halvings) {
      for (std::size_t i = 0; i < d; ++i) q_new[i] = q[i] + step * dir[i];
      G_new = evaluate(q_new, nullptr);
      if (G_new <= G + 1e-4 * step * slope || halvings >= 60) break;
      // Near the optimum the decrease in G drops below rounding; fall back to
      // the size of the gradient.
      if (std::abs(G_new - G) <= noise) {
        G_new = evaluate(q_new, &marg_new);
        if (sup_norm(gradient_of(marg_new)) < sup_norm(raw)) {
          have_marginals = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (halvings >= 60) {
      std::ostringstream msg;
      msg << "marginal projection stalled at marginal error " << sup_norm(raw);
      throw ConvergenceError(msg.str());
    }

    if (!have_marginals) G_new = evaluate(q_new, &marg_new);
    std::vector<double> raw_new = gradient_of(marg_new);
    std::vector<double> g_new = raw_new;
    remove_mean(g_new);

    std::vector<double> s(d), y(d);
    for (std::size_t i = 0; i < d; ++i) {
      s[i] = q_new[i] - q[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-16) {
      std::vector<double> Hy(d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) Hy[i] += H[i * d + j] * y[j];
      const double yHy = dot(y, Hy);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          H[i * d + j] += (sy + yHy) * s[i] * s[j] / (sy * sy) - (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
    }
    q = std::move(q_new);
    G = G_new;
    marg = std::move(marg_new);
    raw = std::move(raw_new);
    g = std::move(g_new);
  }
  if (sup_norm(raw) > options.tol) {
    std::ostringstream msg;
    msg << "marginal projection exceeded its iteration cap at marginal error " << sup_norm(raw);
    throw ConvergenceError(msg.str());
  }

  auto table = linear_combination(phis, q);
  WeightedGibbsMeasure measure(table, chain, a, options.pressure.pressure);
  return ProjectionResult{q, marg, std::move(measure), G, sup_norm(raw), iter};
}

}  // namespace wthermo
