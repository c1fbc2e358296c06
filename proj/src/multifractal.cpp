#include "wthermo/multifractal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wthermo/error.hpp"
#include "wthermo/parallel.hpp"

namespace wthermo {

std::vector<double> symmetric_q_grid(double q_max, std::size_t steps) {
  if (!(q_max >= 0.0) || !std::isfinite(q_max)) throw ModelError("q_max must be finite and >= 0");
  if (steps == 0 || q_max == 0.0) return {0.0};
  std::vector<double> grid;
  const auto s = static_cast<double>(steps);
  for (std::ptrdiff_t j = -static_cast<std::ptrdiff_t>(steps); j <= static_cast<std::ptrdiff_t>(steps); ++j)
    grid.push_back(q_max * static_cast<double>(j) / s);
  return grid;
}

Spectrum birkhoff_spectrum(const FiniteDepthPotential& phi, const FactorChain& chain,
                           const WeightVector& a, const std::vector<double>& q_grid,
                           const PressureFunctionOptions& options) {
  if (q_grid.empty()) throw ModelError("q grid is empty");
  if (!std::is_sorted(q_grid.begin(), q_grid.end())) throw ModelError("q grid must be sorted");
  const std::vector<FiniteDepthPotential> phis{phi};

  std::vector<SpectrumSample> samples(q_grid.size());
  std::vector<char> finite_difference(q_grid.size(), 0);
  parallel_for(q_grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto s = pressure_function(phis, chain, a, {q_grid[j]}, options);
      samples[j] = {q_grid[j], s.gradient[0], s.value - q_grid[j] * s.gradient[0]};
      finite_difference[j] = s.gradient_method != GradientMethod::analytic_depth1;
    }
  });

  Spectrum out;
  out.q_min = q_grid.front();
  out.q_max = q_grid.back();
  out.description = "birkhoff";
  const bool analytic = std::none_of(finite_difference.begin(), finite_difference.end(), [](char c) { return c != 0; });
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, scale = 0.0;
  for (const auto& s : samples) {
    lo = std::min(lo, s.alpha);
    hi = std::max(hi, s.alpha);
    scale = std::max(scale, std::abs(s.alpha));
  }
  const double flat_tol = (analytic ? 1e-10 : 1e-6) * (1.0 + scale);
  if (hi - lo <= flat_tol) {
    // Q is affine: a single level set carries everything.
    const auto nearest = std::min_element(samples.begin(), samples.end(), [](const auto& x, const auto& y) {
      return std::abs(x.q) < std::abs(y.q);
    });
    out.samples = {*nearest};
  } else {
    out.samples = std::move(samples);
  }
  out.alpha_min = out.samples.front().alpha;
  out.alpha_max = out.samples.back().alpha;
  return out;
}

VectorSpectrumResult vector_spectrum(const std::vector<FiniteDepthPotential>& phis, const FactorChain& chain,
                                     const WeightVector& a, const std::vector<double>& alpha_target,
                                     const std::vector<double>& q_init,
                                     const VectorSpectrumOptions& options) {
  const std::size_t d = phis.size();
  if (alpha_target.size() != d || q_init.size() != d)
    throw ModelError("alpha and q_init must match the number of potentials");
  for (double v : alpha_target)
    if (!std::isfinite(v)) throw ModelError("alpha must be finite");

  auto objective = [&](const std::vector<double>& q, std::vector<double>* grad) {
    const auto s = pressure_function(phis, chain, a, q, options.pressure);
    double value = s.value;
    for (std::size_t i = 0; i < d; ++i) value -= alpha_target[i] * q[i];
    if (grad) {
      grad->resize(d);
      for (std::size_t i = 0; i < d; ++i) (*grad)[i] = s.gradient[i] - alpha_target[i];
    }
    return value;
  };
  auto dot = [](const std::vector<double>& x, const std::vector<double>& y) {
    double t = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) t += x[i] * y[i];
    return t;
  };
  auto sup_norm = [](const std::vector<double>& x) {
    double t = 0.0;
    for (double v : x) t = std::max(t, std::abs(v));
    return t;
  };
  constexpr double kNegativeTol = -1e-9;

  VectorSpectrumResult out;
  std::vector<double> q = q_init, g;
  double F = objective(q, &g);
  std::vector<double> H(d * d, 0.0);
  auto reset = [&] {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) H[i * d + i] = 1.0;
  };
  reset();

  for (out.iterations = 0; out.iterations < options.iteration_cap; ++out.iterations) {
    // The dual value is >= 0 on the spectrum's domain, so a negative value
    // certifies that alpha lies outside it.
    if (F < kNegativeTol) {
      out.status = VectorSpectrumStatus::outside_domain;
      out.f = F;
      out.q = q;
      return out;
    }
    if (sup_norm(g) <= options.gradient_tol) break;
    if (sup_norm(q) > options.divergence_radius) break;

    std::vector<double> dir(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) dir[i] -= H[i * d + j] * g[j];
    double slope = dot(g, dir);
    if (slope >= 0.0) {
      reset();
      dir = g;
      for (auto& v : dir) v = -v;
      slope = dot(g, dir);
    }

    auto trial = [&](double step) {
      std::vector<double> x = q;
      for (std::size_t i = 0; i < d; ++i) x[i] += step * dir[i];
      return x;
    };
    double step = 1.0;
    std::vector<double> q_new = trial(step);
    double F_new = objective(q_new, nullptr);
    int halvings = 0;
    while (F_new > F + 1e-4 * step * slope && halvings < 60) {
      step *= 0.5;
      q_new = trial(step);
      F_new = objective(q_new, nullptr);
      ++halvings;
    }
    if (halvings == 60) break;  // no further decrease available at this precision
    if (halvings == 0) {
      // Expand along directions where the objective keeps dropping.
      while (step < 1e6) {
        auto q_far = trial(2.0 * step);
        const double F_far = objective(q_far, nullptr);
        if (!(F_far < F_new)) break;
        step *= 2.0;
        q_new = std::move(q_far);
        F_new = F_far;
      }
    }

    std::vector<double> g_new;
    F_new = objective(q_new, &g_new);
    std::vector<double> s(d), y(d);
    for (std::size_t i = 0; i < d; ++i) {
      s[i] = q_new[i] - q[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-14) {
      std::vector<double> Hy(d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) Hy[i] += H[i * d + j] * y[j];
      const double yHy = dot(y, Hy);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          H[i * d + j] += (sy + yHy) * s[i] * s[j] / (sy * sy) - (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
    }
    q = std::move(q_new);
    g = std::move(g_new);
    F = F_new;
  }

  if (F < kNegativeTol) {
    out.status = VectorSpectrumStatus::outside_domain;
  } else if (sup_norm(g) > options.gradient_tol && sup_norm(q) <= options.divergence_radius &&
             out.iterations >= options.iteration_cap) {
    throw ConvergenceError("vector spectrum did not converge within the iteration cap");
  }
  out.f = F;
  out.q = q;
  return out;
}

FiniteDepthPotential local_dimension_potential(const WeightedGibbsMeasure& mu) {
  if (mu.mode() != GibbsNormalization::exact_depth1)
    throw ModelError("local-dimension spectra need an exact (depth-1) weighted Gibbs measure");
  const auto& chain = mu.chain();
  const auto& a = mu.weights();
  std::vector<double> table(chain.alphabet_size(1), 0.0);
  for (int i = 1; i <= chain.levels(); ++i) {
    if (a.a(i) == 0.0) continue;
    const auto logp = mu.level_log_probabilities(i);
    for (std::size_t s = 0; s < table.size(); ++s)
      table[s] += a.a(i) * logp[chain.tau(i - 1, static_cast<Symbol>(s))];
  }
  const std::size_t alphabet = table.size();
  return FiniteDepthPotential(1, alphabet, 1, std::move(table));
}

Spectrum local_dimension_spectrum(const WeightedGibbsMeasure& mu, const std::vector<double>& q_grid,
                                  const PressureFunctionOptions& options) {
  const auto psi = local_dimension_potential(mu);
  auto spectrum = birkhoff_spectrum(psi.scaled(-1.0), mu.chain(), mu.weights(), q_grid, options);
  spectrum.description = "local_dimension";
  return spectrum;
}

EntropyBracket generic_set_dimension(const InvariantMeasureSpec& eta, const FactorChain& chain,
                                     const WeightVector& a, const EntropyOptions& options) {
  return weighted_entropy(eta, chain, a, options);
}

PressureEnclosure dimension_of_space(const FactorChain& chain, const WeightVector& a) {
  return pressure_closed_form_depth1(FiniteDepthPotential::zero(chain.alphabet_size(1)), chain, a);
}

}  // namespace wthermo
