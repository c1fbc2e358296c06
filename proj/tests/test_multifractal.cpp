#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wthermo/error.hpp"
#include "wthermo/multifractal.hpp"

using namespace wthermo;

namespace {

const FactorChain kCarpet({3, 2}, {{0, 0, 1}});

WeightVector carpet_weights() {
  const double bases[] = {3.0, 2.0};
  return WeightVector::carpet(bases);
}

void check_shape(const Spectrum& s, double dim) {
  for (std::size_t j = 1; j < s.samples.size(); ++j) CHECK(s.samples[j].alpha >= s.samples[j - 1].alpha - 1e-8);
  for (std::size_t j = 1; j + 1 < s.samples.size(); ++j) {
    const auto& l = s.samples[j - 1];
    const auto& m = s.samples[j];
    const auto& r = s.samples[j + 1];
    if (r.alpha - l.alpha < 1e-9) continue;
    const double t = (m.alpha - l.alpha) / (r.alpha - l.alpha);
    CHECK(m.f >= (1 - t) * l.f + t * r.f - 1e-6);
  }
  double best = -INFINITY;
  for (const auto& row : s.samples) {
    CHECK(row.f >= -1e-9);
    CHECK(row.f <= dim + 1e-9);
    best = std::max(best, row.f);
    if (row.q == 0.0) CHECK(std::abs(row.f - dim) < 1e-8);
  }
  CHECK(std::abs(best - dim) < 1e-8);
}

}  // namespace

TEST_CASE("q grid") {
  const auto g = symmetric_q_grid(2.0, 4);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == -2.0);
  CHECK(g[4] == 0.0);
  CHECK(g.back() == 2.0);
  CHECK(symmetric_q_grid(0.0, 5).size() == 1);
  CHECK_THROWS_AS(symmetric_q_grid(-1.0, 3), ModelError);
}

TEST_CASE("dimension of the space") {
  CHECK(dimension_of_space(FactorChain::single(4), WeightVector({1.0})).estimate ==
        doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(std::abs(dimension_of_space(kCarpet, carpet_weights()).estimate - oracle::mcmullen_dimension(3, 2, {2, 1})) <
        1e-12);
  const FactorChain identity({3, 3}, {{0, 1, 2}});
  CHECK(dimension_of_space(identity, WeightVector({0.4, 0.9})).estimate ==
        doctest::Approx(1.3 * std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("Birkhoff spectra") {
  const double dim = oracle::mcmullen_dimension(3, 2, {2, 1});
  SUBCASE("zero potential is degenerate") {
    const auto s = birkhoff_spectrum(FiniteDepthPotential::zero(3), kCarpet, carpet_weights(), symmetric_q_grid(5, 10));
    REQUIRE(s.degenerate());
    CHECK(s.samples[0].alpha == 0.0);
    CHECK(std::abs(s.samples[0].f - dim) < 1e-12);
  }
  SUBCASE("classical two-symbol spectrum") {
    const FiniteDepthPotential g(1, 2, 1, {std::log(1.0), std::log(2.0)});
    const auto s = birkhoff_spectrum(g, FactorChain::single(2), WeightVector({1.0}), symmetric_q_grid(20, 40));
    REQUIRE(s.samples.size() == 81);
    for (const auto& row : s.samples) {
      const double t = row.alpha / std::log(2.0);
      if (t <= 1e-12 || t >= 1 - 1e-12) continue;
      CHECK(std::abs(row.f - oracle::classical_two_symbol_f(row.alpha, 1.0, 2.0)) < 1e-6);
    }
    check_shape(s, std::log(2.0));
    CHECK(s.alpha_min > 0.0);
    CHECK(s.alpha_max < std::log(2.0));
  }
  SUBCASE("symmetric potential") {
    const FiniteDepthPotential g(1, 3, 1, {0.5, -0.5, 0.0});
    const auto s = birkhoff_spectrum(g, kCarpet, carpet_weights(), symmetric_q_grid(4, 8));
    const std::size_t n = s.samples.size();
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(s.samples[j].alpha == doctest::Approx(-s.samples[n - 1 - j].alpha).epsilon(1e-12));
      CHECK(s.samples[j].f == doctest::Approx(s.samples[n - 1 - j].f).epsilon(1e-12));
    }
  }
  SUBCASE("random models: shape and Legendre envelope") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 6; ++trial) {
      const auto c = oracle::random_chain(rng, 1 + trial % 3, 4);
      const auto table = oracle::random_table(rng, c.sizes[0]);
      const FiniteDepthPotential phi(1, c.sizes[0], 1, table);
      const auto grid = symmetric_q_grid(10, 20);
      const auto s = birkhoff_spectrum(phi, c.chain(), c.weights(), grid);
      check_shape(s, oracle::pressure_depth1(c, std::vector<double>(c.sizes[0], 0.0)));
      for (const auto& row : s.samples)
        for (const auto& other : s.samples) {
          std::vector<double> g;
          for (double x : table) g.push_back(other.q * x);
          CHECK(row.f <= oracle::pressure_depth1(c, g) - other.q * row.alpha + 1e-8);
        }
    }
  }
  SUBCASE("depth-2 potential") {
    const FiniteDepthPotential phi(1, 2, 2, {0.3, -0.2, 0.1, 0.5});
    PressureFunctionOptions opts;
    opts.pressure.n_max = 12;
    const auto s = birkhoff_spectrum(phi, FactorChain::single(2), WeightVector({1.0}), symmetric_q_grid(2, 4), opts);
    for (std::size_t j = 1; j < s.samples.size(); ++j) CHECK(s.samples[j].alpha >= s.samples[j - 1].alpha - 1e-6);
    for (const auto& row : s.samples) CHECK(row.f >= -1e-6);
  }
  CHECK_THROWS_AS(birkhoff_spectrum(FiniteDepthPotential::zero(3), kCarpet, carpet_weights(), {1.0, 0.0}),
                  ModelError);
}

TEST_CASE("vector spectra") {
  const double dim = oracle::mcmullen_dimension(3, 2, {2, 1});
  const FiniteDepthPotential u(1, 3, 1, {0.4, -0.3, 0.1});
  const FiniteDepthPotential v(1, 3, 1, {-0.2, 0.6, 0.3});
  const std::vector<FiniteDepthPotential> phis{u, v};
  const auto at0 = pressure_function(phis, kCarpet, carpet_weights(), {0.0, 0.0});

  const auto centre = vector_spectrum(phis, kCarpet, carpet_weights(), at0.gradient, {0.5, -0.5});
  CHECK(centre.status == VectorSpectrumStatus::in_domain);
  CHECK(std::abs(centre.f - dim) < 1e-8);
  CHECK(std::abs(centre.q[0]) < 1e-5);
  CHECK(std::abs(centre.q[1]) < 1e-5);

  const auto inner = pressure_function(phis, kCarpet, carpet_weights(), {1.0, -0.5});
  const auto r = vector_spectrum(phis, kCarpet, carpet_weights(), inner.gradient, {0.0, 0.0});
  CHECK(r.status == VectorSpectrumStatus::in_domain);
  CHECK(r.f == doctest::Approx(inner.value - (1.0 * inner.gradient[0] - 0.5 * inner.gradient[1])).epsilon(1e-7));

  const auto far = vector_spectrum(phis, kCarpet, carpet_weights(), {5.0, 5.0}, {0.0, 0.0});
  CHECK(far.status == VectorSpectrumStatus::outside_domain);

  SUBCASE("repeated potential") {
    const std::vector<FiniteDepthPotential> twice{u, u};
    CHECK(convexity_probe(twice, kCarpet, carpet_weights(), {1.0, -1.0}, {0.0, 0.0}, 2.0, 7).verdict ==
          ConvexityVerdict::affine_within_tol);
    const auto scalar = birkhoff_spectrum(u, kCarpet, carpet_weights(), {0.7});
    const double alpha = scalar.samples[0].alpha;
    const auto diag = vector_spectrum(twice, kCarpet, carpet_weights(), {alpha, alpha}, {0.0, 0.0});
    CHECK(diag.status == VectorSpectrumStatus::in_domain);
    CHECK(diag.f == doctest::Approx(scalar.samples[0].f).epsilon(1e-7));
    const auto off = vector_spectrum(twice, kCarpet, carpet_weights(), {alpha, alpha + 0.05}, {0.0, 0.0});
    CHECK(off.status == VectorSpectrumStatus::outside_domain);
  }
  CHECK_THROWS_AS(vector_spectrum(phis, kCarpet, carpet_weights(), {0.0}, {0.0, 0.0}), ModelError);
}

TEST_CASE("local-dimension spectra") {
  SUBCASE("uniform measure is exact-dimensional") {
    const FactorChain identity({3, 3}, {{0, 1, 2}});
    const WeightVector a({0.4, 0.9});
    const WeightedGibbsMeasure mu(FiniteDepthPotential::zero(3), identity, a);
    const auto s = local_dimension_spectrum(mu, symmetric_q_grid(3, 6));
    REQUIRE(s.degenerate());
    CHECK(s.samples[0].alpha == doctest::Approx(1.3 * std::log(3.0)).epsilon(1e-12));
    CHECK(s.samples[0].f == doctest::Approx(1.3 * std::log(3.0)).epsilon(1e-12));
    CHECK(s.description == "local_dimension");
  }
  SUBCASE("carpet measure of maximal dimension") {
    const auto a = carpet_weights();
    const WeightedGibbsMeasure mu(FiniteDepthPotential::zero(3), kCarpet, a);
    const auto s = local_dimension_spectrum(mu, symmetric_q_grid(3, 6));
    // Psi is constant for this measure, so the spectrum collapses to its q = 0 point.
    REQUIRE(s.degenerate());
    const auto mid = s.samples[0];
    REQUIRE(mid.q == 0.0);
    const double h = weighted_entropy(mu.as_bernoulli(), kCarpet, a).value;
    CHECK(mid.alpha == doctest::Approx(h).epsilon(1e-12));
    CHECK(std::abs(mid.f - oracle::mcmullen_dimension(3, 2, {2, 1})) < 1e-12);
  }
  SUBCASE("pressure of Psi vanishes") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
      const auto c = oracle::random_chain(rng, 1 + trial % 3, 4);
      const WeightedGibbsMeasure mu(FiniteDepthPotential(1, c.sizes[0], 1, oracle::random_table(rng, c.sizes[0])),
                                    c.chain(), c.weights());
      const auto psi = local_dimension_potential(mu);
      CHECK(std::abs(pressure(psi, c.chain(), c.weights()).estimate) < 1e-12);
      const auto s = local_dimension_spectrum(mu, {-1.0, 0.0, 1.0});
      // Q(-1) for -Psi is P^a(T, Psi).
      const auto& row = s.samples[0];
      CHECK(std::abs(row.f + row.q * row.alpha - pressure(psi, c.chain(), c.weights()).estimate) < 1e-12);
      // At that point the equilibrium state is mu: f = alpha = h^a_mu.
      CHECK(row.alpha == doctest::Approx(weighted_entropy(mu.as_bernoulli(), c.chain(), c.weights()).value).epsilon(1e-10));
    }
  }
  SUBCASE("needs an exact measure") {
    PressureOptions opts;
    opts.n_max = 6;
    const WeightedGibbsMeasure deep(FiniteDepthPotential(1, 2, 2, {0.1, 0.2, 0.3, 0.4}), FactorChain::single(2),
                                    WeightVector({1.0}), opts);
    CHECK_THROWS_AS(local_dimension_spectrum(deep, {0.0}), ModelError);
  }
}

TEST_CASE("generic-set dimension") {
  const auto a = carpet_weights();
  const double dim = oracle::mcmullen_dimension(3, 2, {2, 1});
  const WeightedGibbsMeasure mu(FiniteDepthPotential::zero(3), kCarpet, a);
  CHECK(generic_set_dimension(mu.as_bernoulli(), kCarpet, a).value == doctest::Approx(dim).epsilon(1e-12));
  CHECK(generic_set_dimension(InvariantMeasureSpec::bernoulli({0.0, 1.0, 0.0}), kCarpet, a).value == 0.0);
  std::mt19937_64 rng(31);
  for (int j = 0; j < 20; ++j) {
    const auto eta = InvariantMeasureSpec::bernoulli(oracle::random_probability(rng, 3));
    const auto h = generic_set_dimension(eta, kCarpet, a);
    CHECK(h.value <= dim + h.width());
  }
}
