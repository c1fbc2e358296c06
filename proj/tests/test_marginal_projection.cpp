#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wthermo/error.hpp"
#include "wthermo/marginal_projection.hpp"

using namespace wthermo;

namespace {

const FactorChain kCarpet({3, 2}, {{0, 0, 1}});

WeightVector carpet_weights() {
  const double bases[] = {3.0, 2.0};
  return WeightVector::carpet(bases);
}

}  // namespace

TEST_CASE("constraints are validated") {
  CHECK_THROWS_AS(validate_constraint({1, {0.5, 0.5, 0.0}}, 3), ConstraintError);
  CHECK_THROWS_AS(validate_constraint({1, {0.5, 0.5}}, 3), ConstraintError);
  CHECK_THROWS_AS(validate_constraint({1, {0.5, 0.4, 0.2}}, 3), ConstraintError);
  CHECK_THROWS_AS(validate_constraint({1, {0.5, 0.7, -0.2}}, 3), ConstraintError);
  // p(00) + p(01) = 0.5 but p(00) + p(10) = 0.6.
  CHECK_THROWS_AS(validate_constraint({2, {0.3, 0.2, 0.3, 0.2}}, 2), ConstraintError);
  CHECK_NOTHROW(validate_constraint({2, {0.3, 0.2, 0.2, 0.3}}, 2));
  CHECK_THROWS_AS(project({1, {1.0, 0.0, 0.0}}, kCarpet, carpet_weights()), ConstraintError);
}

TEST_CASE("uniform constraint") {
  const FactorChain identity({3, 3}, {{0, 1, 2}});
  const WeightVector a({0.4, 0.9});
  const auto r = project({1, {1.0 / 3, 1.0 / 3, 1.0 / 3}}, identity, a);
  CHECK(r.entropy == doctest::Approx(1.3 * std::log(3.0)).epsilon(1e-10));
  for (double q : r.q) CHECK(std::abs(q) < 1e-8);
  CHECK(r.marginal_error <= 1e-9);
}

TEST_CASE("round trip from a depth-1 equilibrium") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 8; ++trial) {
    const auto c = oracle::random_chain(rng, 1 + trial % 3, 4);
    const auto g = oracle::random_table(rng, c.sizes[0]);
    const auto p = oracle::equilibrium_depth1(c, g);
    const auto r = project({1, p}, c.chain(), c.weights());
    for (std::size_t s = 0; s < p.size(); ++s) CHECK(std::abs(r.marginals[s] - p[s]) <= 1e-9);
    const double h = oracle::weighted_bernoulli_entropy(c, p);
    CHECK(std::abs(r.entropy - h) < 1e-6);
    // Strong duality: the dual value is the weighted entropy of the returned measure.
    CHECK(std::abs(weighted_entropy(r.measure.as_bernoulli(), c.chain(), c.weights()).value - r.entropy) < 1e-6);
    // Same 1-marginals as any Bernoulli comparison with these weights.
    CHECK(r.entropy >= weighted_entropy(InvariantMeasureSpec::bernoulli(p), c.chain(), c.weights()).value - 1e-6);
  }
}

TEST_CASE("translation invariance of the dual") {
  const std::vector<FiniteDepthPotential> ind{FiniteDepthPotential::block_indicator(3, make_word(1, "0")),
                                              FiniteDepthPotential::block_indicator(3, make_word(1, "1")),
                                              FiniteDepthPotential::block_indicator(3, make_word(1, "2"))};
  const std::vector<double> q{0.3, -0.8, 0.5};
  const std::vector<double> shifted{1.3, 0.2, 1.5};
  const auto base = pressure_function(ind, kCarpet, carpet_weights(), q);
  const auto moved = pressure_function(ind, kCarpet, carpet_weights(), shifted);
  CHECK(moved.value == doctest::Approx(base.value + 1.0).epsilon(1e-13));
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(moved.gradient[i] - base.gradient[i]) < 1e-10);
}

TEST_CASE("two-block constraint from a Markov measure") {
  const std::vector<std::vector<double>> T{{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.3, 0.3, 0.4}};
  const auto eta = InvariantMeasureSpec::markov(oracle::stationary(T), T);
  const auto p = eta.block_marginals(2);
  ProjectionOptions opts;
  opts.tol = 1e-6;
  opts.pressure.pressure.n_max = 10;
  const auto r = project({2, p}, kCarpet, carpet_weights(), opts);
  CHECK(r.marginal_error <= 1e-6);
  const auto h = weighted_entropy(eta, kCarpet, carpet_weights());
  CHECK(r.entropy >= h.lo - 1e-6);
  double total = 0.0;
  for (double q : r.q) total += q;
  CHECK(std::abs(total) < 1e-9);
}

TEST_CASE("iteration cap") {
  ProjectionOptions opts;
  opts.iteration_cap = 1;
  CHECK_THROWS_AS(project({1, {0.7, 0.2, 0.1}}, kCarpet, carpet_weights(), opts), ConvergenceError);
}
