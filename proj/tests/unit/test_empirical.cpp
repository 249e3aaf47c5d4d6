#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wdro/empirical.hpp"
#include "wdro/weights.hpp"

using namespace wdro;

TEST_CASE("canonical form sorts, merges and drops zero masses") {
  DiscreteDistribution1D d({3.0, 1.0, 3.0, 2.0}, {0.25, 0.25, 0.25, 0.25});
  CHECK(std::vector<double>(d.atoms().begin(), d.atoms().end()) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(d.masses()[2] == doctest::Approx(0.5));
  CHECK(d.cumulative().back() == 1.0);

  DiscreteDistribution1D z({0.0, 1.0}, {0.0, 1.0});
  CHECK(z.size() == 1);
  CHECK(z.min() == 1.0);

  DiscreteDistribution1D near({1.0, 1.0 + 1e-13}, {0.5, 0.5});
  CHECK(near.size() == 1);
}

TEST_CASE("invalid distributions are rejected") {
  CHECK_THROWS_AS(DiscreteDistribution1D({0.0, 1.0}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution1D({0.0, 1.0}, {1.5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution1D({0.0, 1.0}, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution1D({NAN}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDistribution1D({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(UniformLaw(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("weighted empirical distributions") {
  const std::vector<double> obs{1.0, -1.0, 2.0, 3.0};
  const auto d = make_weighted_empirical(obs, WeightVector({0.08, 0.22, 0.32, 0.38}));
  CHECK(std::vector<double>(d.atoms().begin(), d.atoms().end()) == std::vector<double>{-1.0, 1.0, 2.0, 3.0});
  CHECK(d.masses()[0] == doctest::Approx(0.22));
  CHECK(d.masses()[1] == doctest::Approx(0.08));
  CHECK(d.masses()[2] == doctest::Approx(0.32));
  CHECK(d.masses()[3] == doctest::Approx(0.38));

  const std::vector<double> one{5.0};
  CHECK(make_weighted_empirical(one, WeightVector({1.0})) == DiscreteDistribution1D::point_mass(5.0));

  const std::vector<double> dup{2.0, 2.0};
  const auto merged = make_weighted_empirical(dup, WeightVector({0.4, 0.6}));
  CHECK(merged.size() == 1);
  CHECK(merged.masses()[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_weighted_empirical(obs, WeightVector::uniform(3)), std::invalid_argument);
}

TEST_CASE("left-continuous quantile") {
  DiscreteDistribution1D d({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
  CHECK(d.quantile(0.1) == 0.0);
  CHECK(d.quantile(0.2) == 0.0);
  CHECK(d.quantile(0.2000001) == 1.0);
  CHECK(d.quantile(1.0) == 2.0);
  CHECK_THROWS_AS(d.quantile(0.0), std::invalid_argument);
  const std::vector<double> pts{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(DiscreteDistribution1D::uniform_on(pts).quantile(0.8) == 8.0);
}

TEST_CASE("point-mass distances") {
  const auto d0 = DiscreteDistribution1D::point_mass(0.0);
  const auto d1 = DiscreteDistribution1D::point_mass(1.0);
  for (double p : {1.0, 2.0, 3.5}) CHECK(wasserstein_p(d0, d1, p) == doctest::Approx(1.0));
  const DiscreteDistribution1D half({0.0, 2.0}, {0.5, 0.5});
  CHECK(wasserstein_p(d0, half, 1.0) == doctest::Approx(1.0));
  CHECK(wasserstein_p(d0, half, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(wasserstein_p(half, half, 2.0) == 0.0);
  CHECK_THROWS_AS(wasserstein_p(d0, d1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein_p(d0, d1, INFINITY), std::invalid_argument);
}

TEST_CASE("sup distance") {
  CHECK(wasserstein_inf(DiscreteDistribution1D::point_mass(0.0), DiscreteDistribution1D::point_mass(3.0)) == 3.0);
  const DiscreteDistribution1D a({0.0, 1.0}, {0.5, 0.5});
  const DiscreteDistribution1D b({1.0, 2.0}, {0.5, 0.5});
  CHECK(wasserstein_inf(a, b) == doctest::Approx(1.0));
  CHECK(wasserstein_inf(a, a) == 0.0);
}

TEST_CASE("distance to a point") {
  CHECK(wasserstein_p_point(UniformLaw(0.0, 1.0), 0.5, 2.0) == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-12));
  CHECK(wasserstein_p_point(DiscreteDistribution1D::point_mass(4.0), 4.0, 3.0) == 0.0);
  CHECK(wasserstein_p_point(DiscreteDistribution1D({0.0, 2.0}, {0.5, 0.5}), 1.0, 1.0) == doctest::Approx(1.0));
  // General p against a uniform law equals the moment integral.
  const UniformLaw U(-1.0, 3.0);
  for (double p : {1.0, 1.5, 3.0}) {
    const double direct = std::pow((std::pow(3.0 - 0.5, p + 1) + std::pow(0.5 + 1.0, p + 1)) / ((p + 1) * 4.0), 1.0 / p);
    CHECK(wasserstein_p_point(U, 0.5, p) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("distance to a uniform law") {
  const double m = 1.5;
  const double h = 0.7;
  const UniformLaw U(m - h, m + h);
  CHECK(wasserstein_p_uniform(DiscreteDistribution1D::point_mass(m), U, 2.0) == doctest::Approx(h / std::sqrt(3.0)));

  // Two-point law at the endpoints: the quantile difference is a sawtooth of
  // height (b - a)/2, so the integral is (b - a)/4.
  const UniformLaw ab(2.0, 6.0);
  const DiscreteDistribution1D ends({2.0, 6.0}, {0.5, 0.5});
  CHECK(wasserstein_p_uniform(ends, ab, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(wasserstein_p_uniform_quadrature(ends, ab, 1.0) == doctest::Approx(1.0).epsilon(1e-8));

  // Quantile discretizations converge monotonically.
  double prev = INFINITY;
  for (int s : {2, 4, 8, 16}) {
    std::vector<double> pts;
    for (int i = 1; i <= s; ++i) pts.push_back(ab.quantile(static_cast<double>(i) / s));
    const double d = wasserstein_p_uniform(DiscreteDistribution1D::uniform_on(pts), ab, 2.0);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("closed form and quadrature agree against uniform laws") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto P = wdro_test::random_distribution(gen, 1 + trial % 5);
    const double a = unif(gen);
    const UniformLaw U(a, a + 0.1 + std::abs(unif(gen)));
    for (double p : {1.0, 2.0, 2.5, 4.0}) {
      CHECK(wasserstein_p_uniform(P, U, p) ==
            doctest::Approx(wasserstein_p_uniform_quadrature(P, U, p)).epsilon(1e-6));
    }
  }
}

TEST_CASE("transport agrees with the coupling-polytope LP") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto P = wdro_test::random_distribution(gen, 1 + trial % 6);
    const auto Q = wdro_test::random_distribution(gen, 1 + (trial / 6) % 6);
    for (double p : {1.0, 2.0, 3.0}) {
      const double lp = wdro_test::coupling_lp_distance(P, Q, p);
      CHECK(std::abs(wasserstein_p(P, Q, p) - lp) <= 1e-8);
    }
  }
}

TEST_CASE("metric properties") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto P = wdro_test::random_distribution(gen, 1 + trial % 7);
    const auto Q = wdro_test::random_distribution(gen, 1 + trial % 5);
    const auto R = wdro_test::random_distribution(gen, 1 + trial % 3);
    for (double p : {1.0, 2.0, 3.0}) {
      CHECK(wasserstein_p(P, R, p) <= wasserstein_p(P, Q, p) + wasserstein_p(Q, R, p) + 1e-9);
    }
    const double w1 = wasserstein_p(P, Q, 1.0);
    const double w2 = wasserstein_p(P, Q, 2.0);
    const double w3 = wasserstein_p(P, Q, 3.0);
    CHECK(w1 <= w2 + 1e-9);
    CHECK(w2 <= w3 + 1e-9);
    CHECK(w3 <= wasserstein_inf(P, Q) + 1e-9);
  }
}

TEST_CASE("translation equivariance is exact on dyadic atoms") {
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<int> k(-64, 64);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(4);
    std::vector<double> b(3);
    for (double& v : a) v = k(gen) / 8.0;
    for (double& v : b) v = k(gen) / 8.0;
    const auto P = DiscreteDistribution1D(a, {0.25, 0.25, 0.25, 0.25});
    const auto Q = DiscreteDistribution1D(b, {0.5, 0.25, 0.25});
    const double shift = k(gen) / 4.0;
    for (double p : {1.0, 2.0}) CHECK(wasserstein_p(P, Q, p) == wasserstein_p(P.shifted(shift), Q.shifted(shift), p));
    CHECK(wasserstein_inf(P, Q) == wasserstein_inf(P.shifted(shift), Q.shifted(shift)));
  }
}
