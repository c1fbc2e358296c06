#include "wthermo/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wthermo/error.hpp"
#include "wthermo/log_sum.hpp"

namespace wthermo {

std::string to_string(PressureMethod m) {
  return m == PressureMethod::closed_form ? "closed_form" : "enclosure";
}

std::string to_string(GradientMethod m) {
  return m == GradientMethod::analytic_depth1 ? "analytic_depth1" : "finite_difference";
}

std::string to_string(ConvexityVerdict v) {
  return v == ConvexityVerdict::strictly_convex ? "strictly_convex" : "affine_within_tol";
}

namespace {

void check_shapes(const FiniteDepthPotential& phi, const FactorChain& chain, const WeightVector& a) {
  if (a.size() != chain.levels()) throw ModelError("weight vector and chain disagree on k");
  if (phi.level() != 1) throw ModelError("pressure is defined for level-1 potentials");
  if (phi.alphabet_size() != chain.alphabet_size(1)) throw ModelError("potential alphabet mismatch");
}

}  // namespace

Depth1Cascade depth1_cascade(const FiniteDepthPotential& phi, const FactorChain& chain,
                             const WeightVector& a) {
  check_shapes(phi, chain, a);
  if (!phi.is_depth1()) throw ModelError("closed form needs a depth-1 potential");
  const int k = chain.levels();
  Depth1Cascade out;
  out.log_weights.push_back(phi.log_table());
  for (int i = 1; i < k; ++i) {
    const double A = a.partial(i);
    const auto& fibers = chain.fibers(i);
    const auto& prev = out.log_weights.back();
    std::vector<double> next(fibers.size());
    for (std::size_t j = 0; j < fibers.size(); ++j) {
      std::vector<double> terms;
      for (Symbol s : fibers[j]) terms.push_back(prev[s] / A);
      next[j] = A * log_sum_exp(terms);
    }
    out.log_weights.push_back(std::move(next));
  }
  const double Ak = a.partial(k);
  std::vector<double> terms;
  for (double w : out.log_weights.back()) terms.push_back(w / Ak);
  out.pressure = Ak * log_sum_exp(terms);
  return out;
}

std::vector<double> Depth1Cascade::level_log_probabilities(const FactorChain& chain,
                                                           const WeightVector& a, int level) const {
  const int k = chain.levels();
  if (level < 1 || level > k) throw ModelError("level out of range");
  const double Ak = a.partial(k);
  const auto& own = log_weights[static_cast<std::size_t>(level - 1)];
  std::vector<double> out(own.size());
  for (std::size_t t = 0; t < own.size(); ++t) {
    double value = -pressure / Ak + own[t] / a.partial(level);
    Symbol image = static_cast<Symbol>(t);
    for (int j = level; j < k; ++j) {
      image = chain.project(j, image);
      const double coef = 1.0 / a.partial(j + 1) - 1.0 / a.partial(j);
      if (coef != 0.0) value += coef * log_weights[static_cast<std::size_t>(j)][image];
    }
    out[t] = value;
  }
  return out;
}

std::size_t affordable_length(const FactorChain& chain, const PressureOptions& options) {
  std::size_t best = 0;
  for (std::size_t n = 1; n <= options.n_max; ++n) {
    double words = 0.0;
    for (int i = 2; i <= chain.levels(); ++i)
      words += std::pow(static_cast<double>(chain.alphabet_size(i)), static_cast<double>(n));
    if (words > static_cast<double>(options.word_budget)) break;
    best = n;
  }
  return best;
}

double cascaded_log_sum(const PotentialPtr& phi, const FactorChain& chain, const WeightVector& a,
                        std::size_t n, PushMode mode) {
  const auto cascade = build_cascade(phi, chain, a, mode);
  const double s = cascade.scalar_log_sum(n);
  if (!std::isfinite(s)) throw ModelError("non-finite cascaded sum");
  return s;
}

PressureEnclosure pressure_closed_form_depth1(const FiniteDepthPotential& phi, const FactorChain& chain,
                                              const WeightVector& a) {
  const double p = depth1_cascade(phi, chain, a).pressure;
  return PressureEnclosure{p, p, p, 0, PressureMethod::closed_form};
}

double aitken_limit(const std::vector<double>& values) {
  if (values.empty()) throw ModelError("aitken_limit of an empty sequence");
  const std::size_t n = values.size();
  if (n < 3) return values.back();
  const double x0 = values[n - 3], x1 = values[n - 2], x2 = values[n - 1];
  const double d1 = x1 - x0, d2 = x2 - x1;
  const double denom = d2 - d1;
  if (std::abs(denom) < 1e-12) return x2;
  // Only accelerate sequences that actually contract.
  if (std::abs(d2) >= std::abs(d1)) return x2;
  const double limit = x2 - d2 * d2 / denom;
  return std::isfinite(limit) ? limit : x2;
}

PressureEnclosure pressure_by_enumeration(const PotentialPtr& phi, const FactorChain& chain,
                                          const WeightVector& a, const PressureOptions& options) {
  if (options.n_max < 2) throw BudgetError("n_max must be at least 2 for an enclosure");
  const std::size_t n_used = affordable_length(chain, options);
  if (n_used < 2) throw BudgetError("enumeration budget exhausted before n = 2");

  const auto cascade = build_cascade(phi, chain, a, PushMode::generic);
  const double C = cascade.qm_log_constant();
  std::vector<double> s(n_used + 1, 0.0);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= n_used; ++n) {
    s[n] = cascade.scalar_log_sum(n);
    if (!std::isfinite(s[n])) throw ModelError("non-finite cascaded sum at n = " + std::to_string(n));
    const double dn = static_cast<double>(n);
    hi = std::min(hi, s[n] / dn);
    lo = std::max(lo, (s[n] - C) / dn);
  }
  // Summation error in s_n grows like n * |s_n| * eps; pad both ends by it.
  const double pad = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lo) + std::abs(hi) + C);
  lo -= pad;
  hi += pad;
  std::vector<double> increments;
  for (std::size_t n = 2; n <= n_used; ++n) increments.push_back(s[n] - s[n - 1]);
  double estimate = aitken_limit(increments);
  estimate = std::clamp(estimate, lo, hi);
  return PressureEnclosure{estimate, lo, hi, n_used, PressureMethod::enclosure};
}

PressureEnclosure pressure(const FiniteDepthPotential& phi, const FactorChain& chain,
                           const WeightVector& a, const PressureOptions& options) {
  check_shapes(phi, chain, a);
  if (options.n_max < 2) throw BudgetError("n_max must be at least 2 for an enclosure");
  if (phi.is_depth1() && !options.force_enumeration) return pressure_closed_form_depth1(phi, chain, a);
  return pressure_by_enumeration(std::make_shared<FiniteDepthPotential>(phi), chain, a, options);
}

PressureFunctionSample pressure_function(const std::vector<FiniteDepthPotential>& phis,
                                         const FactorChain& chain, const WeightVector& a,
                                         const std::vector<double>& q,
                                         const PressureFunctionOptions& options) {
  for (double v : q)
    if (!std::isfinite(v)) throw ModelError("q must be finite");
  const auto combined = linear_combination(phis, q);
  PressureFunctionSample out;
  out.q = q;
  out.enclosure = pressure(combined, chain, a, options.pressure);
  out.value = out.enclosure.estimate;
  out.gradient.assign(phis.size(), 0.0);

  const bool analytic = combined.is_depth1() && !options.force_finite_difference &&
                        !options.pressure.force_enumeration;
  if (analytic) {
    out.gradient_method = GradientMethod::analytic_depth1;
    const auto logp = depth1_cascade(combined, chain, a).level_log_probabilities(chain, a, 1);
    for (std::size_t i = 0; i < phis.size(); ++i) {
      double avg = 0.0;
      for (std::size_t s = 0; s < logp.size(); ++s) avg += std::exp(logp[s]) * phis[i].log_table()[s];
      out.gradient[i] = avg;
    }
    return out;
  }

  const double h = options.step;
  if (!(h > 0.0)) throw ModelError("finite-difference step must be positive");
  out.gradient_method = GradientMethod::finite_difference;
  double widest = out.enclosure.width();
  auto value_at = [&](std::size_t i, double delta) {
    std::vector<double> shifted = q;
    shifted[i] += delta;
    const auto e = pressure(linear_combination(phis, shifted), chain, a, options.pressure);
    widest = std::max(widest, e.width());
    return e.estimate;
  };
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const double coarse = (value_at(i, h) - value_at(i, -h)) / (2.0 * h);
    const double fine = (value_at(i, h / 2) - value_at(i, -h / 2)) / h;
    out.gradient[i] = (4.0 * fine - coarse) / 3.0;
  }
  if (widest > options.width_to_step * h)
    throw BudgetError("pressure enclosure too wide for a finite-difference gradient; raise n_max");
  return out;
}

ConvexityReport convexity_probe(const std::vector<FiniteDepthPotential>& phis, const FactorChain& chain,
                                const WeightVector& a, const std::vector<double>& direction,
                                const std::vector<double>& q0, double span, std::size_t samples,
                                const PressureOptions& options) {
  if (direction.size() != phis.size() || q0.size() != phis.size())
    throw ModelError("direction and q0 must match the number of potentials");
  if (std::all_of(direction.begin(), direction.end(), [](double v) { return v == 0.0; }))
    throw ModelError("probe direction must be non-zero");
  if (samples < 3) samples = 3;
  if (!(span > 0.0)) throw ModelError("probe span must be positive");

  std::vector<double> t(samples), value(samples);
  double widest = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < samples; ++j) {
    t[j] = -span + 2.0 * span * static_cast<double>(j) / static_cast<double>(samples - 1);
    std::vector<double> q = q0;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += t[j] * direction[i];
    const auto e = pressure(linear_combination(phis, q), chain, a, options);
    value[j] = e.estimate;
    widest = std::max(widest, e.width());
    scale = std::max(scale, std::abs(e.estimate));
  }
  ConvexityReport report;
  for (std::size_t j = 0; j < samples; ++j) {
    const double w = (t[j] - t.front()) / (t.back() - t.front());
    const double chord = (1.0 - w) * value.front() + w * value.back();
    report.max_deviation = std::max(report.max_deviation, std::abs(chord - value[j]));
  }
  report.tolerance = widest + 1e-9 * (1.0 + scale);
  report.verdict = report.max_deviation <= report.tolerance ? ConvexityVerdict::affine_within_tol
                                                            : ConvexityVerdict::strictly_convex;
  return report;
}

}  // namespace wthermo
