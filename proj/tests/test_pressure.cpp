#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wthermo/error.hpp"
#include "wthermo/parallel.hpp"
#include "wthermo/pressure.hpp"

using namespace wthermo;

namespace {

const FactorChain kCarpet({3, 2}, {{0, 0, 1}});

WeightVector carpet_weights() {
  const double bases[] = {3.0, 2.0};
  return WeightVector::carpet(bases);
}

// A log spectral radius of the positive matrix exp(g(uv) / A) by power iteration.
double log_spectral_radius(const std::vector<double>& g, std::size_t alphabet, double A) {
  std::vector<double> v(alphabet, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    std::vector<double> w(alphabet, 0.0);
    for (std::size_t u = 0; u < alphabet; ++u)
      for (std::size_t t = 0; t < alphabet; ++t) w[u] += std::exp(g[u * alphabet + t] / A) * v[t];
    double norm = 0.0;
    for (double x : w) norm = std::max(norm, x);
    for (auto& x : w) x /= norm;
    lambda = std::log(norm);
    v = w;
  }
  return lambda;
}

}  // namespace

TEST_CASE("closed form examples") {
  CHECK(pressure_closed_form_depth1(FiniteDepthPotential::zero(5), FactorChain::single(5), WeightVector({1.0}))
            .estimate == doctest::Approx(std::log(5.0)).epsilon(1e-15));

  const auto carpet = pressure_closed_form_depth1(FiniteDepthPotential::zero(3), kCarpet, carpet_weights());
  CHECK(std::abs(carpet.estimate - oracle::mcmullen_dimension(3, 2, {2, 1})) < 1e-12);
  CHECK(std::abs(carpet.estimate - 1.3496838201955774) < 1e-12);
  CHECK(carpet.lo == carpet.hi);
  CHECK(carpet.method == PressureMethod::closed_form);

  const FactorChain identity({3, 3}, {{0, 1, 2}});
  const auto e = pressure_closed_form_depth1(FiniteDepthPotential::constant(3, 1.0), identity, WeightVector({1.0, 1.0}));
  CHECK(e.estimate == doctest::Approx(2 * std::log(3.0) + 1.0).epsilon(1e-14));

  const FactorChain collapse({4, 1}, {{0, 0, 0, 0}});
  CHECK(pressure_closed_form_depth1(FiniteDepthPotential::zero(4), collapse, WeightVector({0.6, 0.9})).estimate ==
        doctest::Approx(0.6 * std::log(4.0)).epsilon(1e-14));
  const FactorChain same({4, 4}, {{0, 1, 2, 3}});
  CHECK(pressure_closed_form_depth1(FiniteDepthPotential::zero(4), same, WeightVector({0.6, 0.9})).estimate ==
        doctest::Approx(1.5 * std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("closed form matches the independent recursion") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const auto c = oracle::random_chain(rng, 1 + trial % 3, 4);
    const auto g = oracle::random_table(rng, c.sizes[0], 2.0);
    const FiniteDepthPotential phi(1, c.sizes[0], 1, g);
    CHECK(pressure(phi, c.chain(), c.weights()).estimate ==
          doctest::Approx(oracle::pressure_depth1(c, g)).epsilon(1e-13));
  }
}

TEST_CASE("depth-1 cascades are exactly multiplicative") {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = oracle::random_chain(rng, 1 + trial % 3, 3);
    const auto g = oracle::random_table(rng, c.sizes[0]);
    auto phi = std::make_shared<FiniteDepthPotential>(1, c.sizes[0], 1, g);
    const double P = oracle::pressure_depth1(c, g);
    for (std::size_t n = 1; n <= 5; ++n) {
      CHECK(cascaded_log_sum(phi, c.chain(), c.weights(), n, PushMode::generic) ==
            doctest::Approx(n * P).epsilon(1e-12));
      CHECK(oracle::cascaded_log_sum(c, g, 1, n) == doctest::Approx(n * P).epsilon(1e-12));
    }
  }
}

TEST_CASE("enumeration enclosures") {
  SUBCASE("carpet") {
    PressureOptions opts;
    opts.force_enumeration = true;
    const auto e = pressure(FiniteDepthPotential::zero(3), kCarpet, carpet_weights(), opts);
    CHECK(e.method == PressureMethod::enclosure);
    CHECK(e.n_used == 12);
    CHECK(e.contains(oracle::mcmullen_dimension(3, 2, {2, 1})));
    CHECK(e.width() <= 0.05);
  }
  SUBCASE("zero potential tagged with depth 3") {
    const auto zero3 = FiniteDepthPotential::zero(3).broadcast(3);
    PressureOptions opts;
    opts.n_max = 8;
    const auto e = pressure(zero3, kCarpet, carpet_weights(), opts);
    CHECK(e.method == PressureMethod::enclosure);
    CHECK(e.contains(oracle::mcmullen_dimension(3, 2, {2, 1})));
  }
  SUBCASE("depth-1 in disguise") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 8; ++trial) {
      const auto c = oracle::random_chain(rng, 1 + trial % 3, 3);
      const auto g = oracle::random_table(rng, c.sizes[0]);
      const FiniteDepthPotential phi(1, c.sizes[0], 1, g);
      PressureOptions opts;
      opts.n_max = 8;
      const auto e = pressure(phi.broadcast(2), c.chain(), c.weights(), opts);
      CHECK(e.contains(oracle::pressure_depth1(c, g)));
      CHECK(e.lo <= e.estimate);
      CHECK(e.estimate <= e.hi);
    }
  }
  SUBCASE("depth-2 against the transfer matrix") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 8; ++trial) {
      const std::size_t N = 2 + static_cast<std::size_t>(trial % 2);
      const auto g = oracle::random_table(rng, N * N);
      const FiniteDepthPotential phi(1, N, 2, g);
      PressureOptions opts;
      opts.n_max = 10;
      const double a1 = 0.8;
      const auto e1 = pressure(phi, FactorChain::single(N), WeightVector({a1}), opts);
      CHECK(e1.contains(a1 * log_spectral_radius(g, N, a1), 1e-12));
      CHECK(std::abs(e1.estimate - a1 * log_spectral_radius(g, N, a1)) < 1e-4);

      std::vector<Symbol> id(N);
      for (std::size_t s = 0; s < N; ++s) id[s] = static_cast<Symbol>(s);
      const FactorChain identity({N, N}, {id});
      const auto e2 = pressure(phi, identity, WeightVector({a1, 0.5}), opts);
      CHECK(e2.contains(1.3 * log_spectral_radius(g, N, 1.3), 1e-12));
    }
  }
  SUBCASE("budget errors") {
    PressureOptions opts;
    opts.n_max = 1;
    CHECK_THROWS_AS(pressure(FiniteDepthPotential::zero(3), kCarpet, carpet_weights(), opts), BudgetError);
    opts.n_max = 12;
    opts.word_budget = 1;
    opts.force_enumeration = true;
    CHECK_THROWS_AS(pressure(FiniteDepthPotential::zero(3), kCarpet, carpet_weights(), opts), BudgetError);
  }
}

TEST_CASE("upper sequence (s_n + C)/n") {
  // Observed, not proven: monotone on every sampled depth-2 potential.
  std::mt19937_64 rng(12);
  int monotone = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    const auto c = oracle::random_chain(rng, 2, 3);
    const auto g = oracle::random_table(rng, c.sizes[0] * c.sizes[0]);
    auto phi = std::make_shared<FiniteDepthPotential>(1, c.sizes[0], 2, g);
    const auto cascade = build_cascade(phi, c.chain(), c.weights(), PushMode::generic);
    const double C = cascade.qm_log_constant();
    double prev = INFINITY;
    bool ok = true;
    for (std::size_t n = 1; n <= 8; ++n) {
      const double v = (cascade.scalar_log_sum(n) + C) / static_cast<double>(n);
      if (v > prev + 1e-12) ok = false;
      prev = v;
    }
    monotone += ok;
  }
  MESSAGE("(s_n + C)/n nonincreasing in " << monotone << "/" << trials << " random depth-2 cases");
  CHECK(monotone == trials);
}

TEST_CASE("aitken extrapolation") {
  std::vector<double> v;
  for (int n = 0; n < 6; ++n) v.push_back(2.0 + 0.5 * std::pow(0.3, n));
  CHECK(aitken_limit(v) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(aitken_limit({1.0, 1.0, 1.0}) == 1.0);
  CHECK(aitken_limit({1.0, 2.0}) == 2.0);
  CHECK(aitken_limit({0.0, 1.0, 3.0}) == 3.0);
}

TEST_CASE("pressure function") {
  SUBCASE("classical Gibbs gradient") {
    const std::vector<double> g{0.3, -0.4, 1.2};
    const std::vector<FiniteDepthPotential> phis{FiniteDepthPotential(1, 3, 1, g)};
    for (double q : {-2.0, 0.0, 0.7, 3.0}) {
      const auto s = pressure_function(phis, FactorChain::single(3), WeightVector({1.0}), {q});
      std::vector<double> terms;
      for (double x : g) terms.push_back(q * x);
      const double Z = oracle::lse(terms);
      double mean = 0.0;
      for (double x : g) mean += std::exp(q * x - Z) * x;
      CHECK(s.value == doctest::Approx(Z).epsilon(1e-14));
      CHECK(s.gradient[0] == doctest::Approx(mean).epsilon(1e-13));
      CHECK(s.gradient_method == GradientMethod::analytic_depth1);
    }
  }
  SUBCASE("analytic gradient matches finite differences") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 10; ++trial) {
      const auto c = oracle::random_chain(rng, 1 + trial % 3, 4);
      std::vector<FiniteDepthPotential> phis;
      for (int d = 0; d < 2; ++d) phis.emplace_back(1, c.sizes[0], 1, oracle::random_table(rng, c.sizes[0]));
      const std::vector<double> q{0.5 * (trial % 5) - 1.0, 0.3};
      const auto analytic = pressure_function(phis, c.chain(), c.weights(), q);
      PressureFunctionOptions fd;
      fd.force_finite_difference = true;
      const auto numeric = pressure_function(phis, c.chain(), c.weights(), q, fd);
      CHECK(numeric.gradient_method == GradientMethod::finite_difference);
      for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(analytic.gradient[i] - numeric.gradient[i]) < 1e-7);
    }
  }
  SUBCASE("gradient at q = 0 is the equilibrium average") {
    const std::vector<double> g{0.2, -0.5, 0.9};
    const std::vector<FiniteDepthPotential> phis{FiniteDepthPotential(1, 3, 1, g)};
    const auto s = pressure_function(phis, kCarpet, carpet_weights(), {0.0});
    // Maximal-dimension measure on the carpet: p_s proportional to N_{pi s}^{A_1/A_2 - 1}.
    const double A1 = carpet_weights().partial(1), A2 = carpet_weights().partial(2);
    const std::vector<double> fibre{2, 2, 1};
    std::vector<double> w(3);
    double Z = 0.0;
    for (int s2 = 0; s2 < 3; ++s2) Z += (w[s2] = std::pow(fibre[s2], A1 / A2 - 1.0));
    double mean = 0.0;
    for (int s2 = 0; s2 < 3; ++s2) mean += w[s2] / Z * g[s2];
    CHECK(s.value == doctest::Approx(oracle::mcmullen_dimension(3, 2, {2, 1})).epsilon(1e-13));
    CHECK(s.gradient[0] == doctest::Approx(mean).epsilon(1e-12));
  }
  SUBCASE("depth-2 gradient and width guard") {
    const std::vector<FiniteDepthPotential> phis{FiniteDepthPotential(1, 2, 2, {0.3, -0.2, 0.1, 0.5})};
    const std::vector<FiniteDepthPotential> wide{FiniteDepthPotential(1, 2, 2, {3.0, -2.0, 1.0, 5.0})};
    PressureFunctionOptions opts;
    opts.pressure.n_max = 10;
    const auto s = pressure_function(phis, FactorChain::single(2), WeightVector({1.0}), {0.4}, opts);
    CHECK(s.gradient_method == GradientMethod::finite_difference);
    const double h = 1e-4;
    auto Q = [&](double q) { return 1.0 * log_spectral_radius({0.3 * q, -0.2 * q, 0.1 * q, 0.5 * q}, 2, 1.0); };
    CHECK(s.gradient[0] == doctest::Approx((Q(0.4 + h) - Q(0.4 - h)) / (2 * h)).epsilon(1e-5));
    opts.width_to_step = 1.0;
    CHECK_THROWS_AS(pressure_function(wide, FactorChain::single(2), WeightVector({1.0}), {1.0}, opts), BudgetError);
  }
  SUBCASE("midpoint convexity") {
    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 10; ++trial) {
      const auto c = oracle::random_chain(rng, 2, 3);
      const std::vector<FiniteDepthPotential> phis{
          FiniteDepthPotential(1, c.sizes[0], 2, oracle::random_table(rng, c.sizes[0] * c.sizes[0]))};
      PressureFunctionOptions opts;
      opts.pressure.n_max = 8;
      const double q1 = -1.0 + 0.2 * trial, q2 = q1 + 1.5;
      const auto s1 = pressure_function(phis, c.chain(), c.weights(), {q1}, opts);
      const auto s2 = pressure_function(phis, c.chain(), c.weights(), {q2}, opts);
      const auto sm = pressure_function(phis, c.chain(), c.weights(), {(q1 + q2) / 2}, opts);
      const double width =
          std::max({s1.enclosure.width(), s2.enclosure.width(), sm.enclosure.width()});
      CHECK(sm.value <= (s1.value + s2.value) / 2 + 2 * width + 1e-12);
    }
  }
}

TEST_CASE("convexity probe") {
  const FiniteDepthPotential phi(1, 3, 1, {0.3, -0.4, 1.2});
  const std::vector<FiniteDepthPotential> twice{phi, phi};
  CHECK(convexity_probe(twice, kCarpet, carpet_weights(), {1.0, -1.0}, {0.2, 0.1}, 2.0, 9).verdict ==
        ConvexityVerdict::affine_within_tol);

  const std::vector<FiniteDepthPotential> constant{FiniteDepthPotential::constant(3, 0.7)};
  CHECK(convexity_probe(constant, kCarpet, carpet_weights(), {1.0}, {0.0}, 3.0, 7).verdict ==
        ConvexityVerdict::affine_within_tol);

  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t N = 2 + static_cast<std::size_t>(trial % 3);
    const std::vector<FiniteDepthPotential> generic{FiniteDepthPotential(1, N, 1, oracle::random_table(rng, N))};
    const auto report = convexity_probe(generic, FactorChain::single(N), WeightVector({1.0}), {1.0}, {0.0}, 1.0, 5);
    CHECK(report.verdict == ConvexityVerdict::strictly_convex);
    // Oracle: second difference of the classical closed form at t = 0.
    auto Q = [&](double q) {
      std::vector<double> terms;
      for (double x : generic[0].log_table()) terms.push_back(q * x);
      return oracle::lse(terms);
    };
    CHECK(Q(1.0) + Q(-1.0) - 2 * Q(0.0) > 1e-6);
  }
  CHECK_THROWS_AS(convexity_probe(twice, kCarpet, carpet_weights(), {0.0, 0.0}, {0.0, 0.0}, 1.0, 5), ModelError);
}

TEST_CASE("results do not depend on the worker count") {
  const FiniteDepthPotential phi(1, 3, 2, {0.1, -0.3, 0.2, 0.5, 0.0, -0.1, 0.3, 0.2, -0.4});
  PressureOptions opts;
  opts.n_max = 10;
  std::vector<PressureEnclosure> out;
  for (int t : {1, 2, 8}) {
    set_worker_count(t);
    out.push_back(pressure(phi, kCarpet, carpet_weights(), opts));
  }
  set_worker_count(0);
  for (const auto& e : out) {
    CHECK(e.estimate == out[0].estimate);
    CHECK(e.lo == out[0].lo);
    CHECK(e.hi == out[0].hi);
  }
}
