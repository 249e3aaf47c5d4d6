// Newsvendor experiment under Binomial demand whose success probability
// follows a projected random walk, with ex-post parameter sweeps comparing
// sample averaging, exponential smoothing, weighted-ball DRO and
// intersection DRO.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace wdro {

struct DemandModel {
  int n = 1000;
  double theta1 = 1.0 / 3.0;
  double delta = 0.0;
  std::size_t T = 70;
  void validate() const;
};

/// theta_1, ..., theta_horizon with theta_{t+1} = clamp(theta_t + U(-delta, delta), 0, 1).
std::vector<double> simulate_theta_path(const DemandModel& model, std::size_t horizon, std::uint64_t seed);

/// E[c_u (D - x)_+ + c_o (x - D)_+] for D ~ Binomial(n, theta).
double expected_newsvendor_cost_binomial(double x, int n, double theta, double c_u, double c_o);
/// Same expectation for an arbitrary pmf on {0, ..., pmf.size() - 1}.
double expected_newsvendor_cost(double x, std::span<const double> pmf, double c_u, double c_o);

/// n equally spaced values from a to b inclusive.
std::vector<double> lin_range(double a, double b, std::size_t n);
/// n geometrically spaced values from a to b inclusive.
std::vector<double> log_range(double a, double b, std::size_t n);

enum class SweepMethod { Saa, Smoothing, WeightedDro, IntersectionDro };
std::string_view to_string(SweepMethod m);

struct SweepConfig {
  std::vector<SweepMethod> methods{SweepMethod::Saa, SweepMethod::Smoothing, SweepMethod::WeightedDro,
                                   SweepMethod::IntersectionDro};
  std::vector<double> deltas;
  /// Radius grid shared by both DRO methods.
  std::vector<double> epsilons;
  /// rho/eps grid shared by both DRO methods.
  std::vector<double> rho_over_eps;
  /// Smoothing rates.
  std::vector<double> alphas;
  std::size_t simulations = 20;
  /// Draws of the next-period theta averaged when scoring an order.
  std::size_t jumps = 200;
  std::uint64_t seed = 0;
  double c_u = 4.0;
  double c_o = 1.0;
  double p = 2.0;
  /// Grid points of the intersection LP over [0, n].
  std::size_t intersection_grid = 1001;

  /// Full parameter grids with 20 simulations and 200 jumps.
  static SweepConfig desk();
  /// Full parameter grids with 100 simulations and 1000 jumps.
  static SweepConfig paper();
  static std::vector<double> default_deltas();
  static std::vector<double> default_epsilons();
  void validate() const;
};

struct SweepCell {
  SweepMethod method;
  double delta;
  double epsilon;
  /// rho/eps for the DRO methods, alpha for smoothing, 0 for SAA.
  double param;
  double mean_cost;
  double stderr_cost;
  /// Simulations in which the order could not be computed.
  std::size_t failures;
};

struct SweepOptimum {
  SweepMethod method;
  double delta;
  double epsilon;
  double param;
  double mean_cost;
  double stderr_cost;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  /// Best cell per (method, delta) among cells without failures.
  std::vector<SweepOptimum> optima;
  /// Throws std::out_of_range if absent.
  const SweepOptimum& optimum(SweepMethod m, double delta) const;
};

/// OpenMP-parallel over (delta, simulation) units; bitwise equal to
/// expost_sweep_serial.
SweepResult expost_sweep(const DemandModel& model, const SweepConfig& cfg);
SweepResult expost_sweep_serial(const DemandModel& model, const SweepConfig& cfg);

}  // namespace wdro
