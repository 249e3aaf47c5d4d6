#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "wdro/dro.hpp"
#include "wdro/sim.hpp"

using namespace wdro;

namespace {

SweepConfig small_config() {
  SweepConfig cfg = SweepConfig::desk();
  cfg.deltas = {0.0, 0.02};
  cfg.epsilons = {0.0, 2.0, 10.0};
  cfg.rho_over_eps = {0.0, 0.01};
  cfg.alphas = {0.0, 0.3};
  cfg.simulations = 3;
  cfg.jumps = 20;
  cfg.intersection_grid = 201;
  cfg.seed = 5;
  return cfg;
}

DemandModel small_model() {
  DemandModel m;
  m.n = 100;
  m.T = 12;
  return m;
}

}  // namespace

inline bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

inline bool same_cell(const SweepCell& a, const SweepCell& b) {
  return a.method == b.method && same_bits(a.delta, b.delta) && same_bits(a.epsilon, b.epsilon) &&
         same_bits(a.param, b.param) && same_bits(a.mean_cost, b.mean_cost) &&
         same_bits(a.stderr_cost, b.stderr_cost) && a.failures == b.failures;
}

TEST_CASE("theta paths") {
  DemandModel m;
  const auto flat = simulate_theta_path(m, 80, 1);
  CHECK(flat.size() == 80);
  for (double v : flat) CHECK(v == 1.0 / 3.0);

  m.delta = 2.0;
  for (double v : simulate_theta_path(m, 500, 2)) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  m.delta = 0.01;
  const auto a = simulate_theta_path(m, 71, 42);
  CHECK(a == simulate_theta_path(m, 71, 42));
  CHECK(a != simulate_theta_path(m, 71, 43));
  CHECK(a.front() == 1.0 / 3.0);
  CHECK_THROWS_AS(simulate_theta_path(m, 0, 1), std::invalid_argument);
}

TEST_CASE("expected newsvendor cost") {
  CHECK(expected_newsvendor_cost_binomial(7.0, 20, 0.0, 4.0, 1.0) == doctest::Approx(7.0));
  CHECK(expected_newsvendor_cost_binomial(7.0, 20, 1.0, 4.0, 1.0) == doctest::Approx(52.0));
  CHECK(expected_newsvendor_cost_binomial(1.0, 2, 0.5, 4.0, 1.0) == doctest::Approx(1.25));
  CHECK_THROWS_AS(expected_newsvendor_cost_binomial(30.0, 20, 0.5, 4.0, 1.0), std::invalid_argument);
  for (double theta : {0.01, 0.3, 0.7}) {
    for (double x : {0.0, 250.0, 333.3, 1000.0}) {
      const double c = expected_newsvendor_cost_binomial(x, 1000, theta, 4.0, 1.0);
      CHECK(c >= 0.0);
      CHECK(c <= 4000.0);
    }
  }
  const std::vector<double> pmf{0.25, 0.5, 0.25};
  CHECK(expected_newsvendor_cost(1.0, pmf, 4.0, 1.0) == doctest::Approx(1.25));
}

TEST_CASE("ranges") {
  const auto lin = lin_range(0.0, 10.0, 11);
  for (int i = 0; i <= 10; ++i) CHECK(lin[i] == doctest::Approx(i));
  CHECK(lin.back() == 10.0);
  CHECK(lin_range(3.0, 3.0, 1) == std::vector<double>{3.0});
  const auto lg = log_range(1e-4, 1.0, 5);
  CHECK(lg.front() == 1e-4);
  CHECK(lg.back() == 1.0);
  for (std::size_t i = 1; i < lg.size(); ++i) CHECK(lg[i] / lg[i - 1] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(lg[2] == doctest::Approx(1e-2));
  CHECK_THROWS_AS(lin_range(2.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(lin_range(1.0, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(log_range(0.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("default grids") {
  const auto d = SweepConfig::default_deltas();
  CHECK(d.size() == 8);
  CHECK(d.front() == 0.0);
  CHECK(d[1] == 1e-4);
  CHECK(d.back() == 1e-1);
  const auto cfg = SweepConfig::desk();
  CHECK(cfg.simulations == 20);
  CHECK(cfg.jumps == 200);
  CHECK(cfg.rho_over_eps.size() == 31);
  CHECK(cfg.rho_over_eps.front() == 0.0);
  CHECK(cfg.epsilons.front() == 0.0);
  const auto paper = SweepConfig::paper();
  CHECK(paper.simulations == 100);
  CHECK(paper.jumps == 1000);
  SweepConfig bad = cfg;
  bad.simulations = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sweep structure and determinism") {
  const auto cfg = small_config();
  const auto model = small_model();
  const auto r = expost_sweep(model, cfg);
  // saa: 1, smoothing: 2, weighted: 3 x 2, intersection: 3 x 2, per delta.
  CHECK(r.cells.size() == 2 * (1 + 2 + 6 + 6));
  for (const auto& c : r.cells) {
    CHECK(c.stderr_cost >= 0.0);
    if (c.failures == 0) CHECK(c.mean_cost >= 0.0);
  }
  for (const auto& o : r.optima) {
    for (const auto& c : r.cells) {
      if (c.method == o.method && c.delta == o.delta && c.failures == 0) CHECK(o.mean_cost <= c.mean_cost);
    }
  }
  const auto again = expost_sweep(model, cfg);
  REQUIRE(again.cells.size() == r.cells.size());
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    CHECK(same_cell(again.cells[i], r.cells[i]));
  }
}

TEST_CASE("zero-radius cells coincide with sample average approximation") {
  auto cfg = small_config();
  cfg.methods = {SweepMethod::Saa, SweepMethod::Smoothing, SweepMethod::WeightedDro};
  const auto r = expost_sweep(small_model(), cfg);
  for (double delta : cfg.deltas) {
    double saa = NAN, smooth0 = NAN, dro0 = NAN;
    for (const auto& c : r.cells) {
      if (c.delta != delta) continue;
      if (c.method == SweepMethod::Saa) saa = c.mean_cost;
      if (c.method == SweepMethod::Smoothing && c.param == 0.0) smooth0 = c.mean_cost;
      if (c.method == SweepMethod::WeightedDro && c.epsilon == 0.0 && c.param == 0.0) dro0 = c.mean_cost;
    }
    CHECK(saa == smooth0);
    CHECK(saa == dro0);
  }
}

TEST_CASE("parallel and serial sweeps are bitwise equal") {
  const auto cfg = small_config();
  const auto model = small_model();
  const auto a = expost_sweep(model, cfg);
  const auto b = expost_sweep_serial(model, cfg);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(same_cell(a.cells[i], b.cells[i]));
}
