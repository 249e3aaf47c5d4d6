// Finite-sample tail bounds for weighted empirical laws, with and without
// distributional drift, plus a Monte-Carlo engine to check them.
//
// The bound constants are never instantiated in closed form by the theory;
// they are configuration, defaulting to 1 (or to the McDiarmid value
// 2 diam^(-2p) for c1 when the support diameter is supplied).
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wdro/empirical.hpp"
#include "wdro/weights.hpp"

namespace wdro {

/// Constants of the stationary and drifting tail bounds.
struct BoundParams {
  int m = 1;           // ambient dimension; only enters q
  double p = 1.0;      // Wasserstein order
  double q = 0.499;    // rate exponent, in (0, 1/2)
  double c0 = 1.0;     // expectation-bound constant
  double c1 = 1.0;     // exponential rate
  double c2 = 1.0;     // bias coefficient on N_eff^(-q)
  double diam = 1.0;   // diameter of the support

  /// q = min(p/m, 1/2) - delta. When delta is omitted it defaults to 1e-3 if
  /// p/m >= 1/2 and to 0 otherwise. c1 defaults to 2 diam^(-2p) when `diam`
  /// is given and to 1 otherwise.
  static BoundParams make(int m, double p, std::optional<double> delta = std::nullopt,
                          std::optional<double> diam = std::nullopt);
  /// Throws std::invalid_argument if any invariant fails.
  void validate() const;
};

/// min(1, exp(-c1 N (eps^p - c2 N^-q)_+^2)).
double stationary_tail_bound(double n_eff, double eps, const BoundParams& bp);

/// exp(-(c1/4) N eps^(2p)); valid once eps >= 2 (c2 N^-q)^(1/p).
double stationary_tail_bound_clean(double n_eff, double eps, const BoundParams& bp);
bool clean_tail_applies(double n_eff, double eps, const BoundParams& bp);

/// Drifting bound: the stationary bound evaluated at (eps - D_p(w) rho)_+ and
/// N_eff(w). Equal to stationary_tail_bound bitwise when rho = 0.
double drift_tail_bound(const WeightVector& w, double eps, double rho, const BoundParams& bp);

/// Smallest eps for which drift_tail_bound(w, eps, rho) <= beta.
double drift_radius(const WeightVector& w, double beta, double rho, const BoundParams& bp);

/// Constants of the p = 1 radius-scaling result. They play different roles
/// from BoundParams: `bias` multiplies N_eff^-q and `rate` multiplies N_eff in
/// the exponent.
struct RadiusParams {
  double bias = 1.0;
  double rate = 1.0;
  double q = 0.499;
};

enum class DriftRegime { SmallDrift, LargeDrift };
std::string_view to_string(DriftRegime r);

struct ConfidenceRadius {
  double radius;
  DriftRegime regime;
  /// Support of the triangular weights achieving the radius.
  std::size_t support;
  /// Drift threshold separating the two regimes.
  double rho_star;
};

/// rho_*(beta) = (12/rate log(1/beta))^(1/2).
double drift_threshold(double beta, const RadiusParams& rp);

/// Minimal achievable radius for p = 1 under the two-regime rule. At
/// rho = rho_* the large-drift branch is returned. Throws std::invalid_argument
/// naming the required history length when T is too short for the
/// small-drift support.
ConfidenceRadius confidence_radius(double beta, double rho, std::size_t T, const RadiusParams& rp);

struct IntersectionRadii {
  /// eps_t for t = 1..T (index 0 is the oldest).
  std::vector<double> radii;
  double min_radius;
  /// eps_single(beta) for the total violation level.
  double single_radius_total;
  /// min_radius >= single_radius_total, i.e. the intersection cannot shrink
  /// below the one-sample radius.
  bool non_collapse;
};

/// eps_t = eps_single(beta_t) + (T - t + 1) rho.
IntersectionRadii intersection_radii(std::size_t T, double rho, const std::function<double(double)>& eps_single,
                                     std::span<const double> betas);

/// Radius making the one-sample stationary bound equal to beta:
/// (c2 + sqrt(log(1/beta)/c1))^(1/p).
double single_sample_radius(double beta, const BoundParams& bp);

/// Families of drifting data-generating sequences with closed-form laws.
enum class DriftFamily { StationaryBinomial, ShiftedBinomial, ShiftedUniformAtoms };
std::string_view to_string(DriftFamily f);
/// Throws std::invalid_argument on an unknown tag.
DriftFamily parse_drift_family(std::string_view tag);

/// P_t for t = 1..T+1. Shifted families translate the base law by
/// (t - T - 1) rho so that W_inf(P_t, P_{t+1}) = rho and P_{T+1} is the base.
struct DriftSequenceSpec {
  DriftFamily family = DriftFamily::StationaryBinomial;
  double rho = 0.0;
  std::size_t T = 1;
  int n = 100;              // binomial trials
  double theta = 1.0 / 3.0; // binomial success probability
  int atoms = 10;           // uniform-atoms family: equally spaced atoms on [0, 1]

  DiscreteDistribution1D base_law() const;
  /// Law at time t in [1, T + 1].
  DiscreteDistribution1D law(std::size_t t) const;
  DiscreteDistribution1D target() const { return law(T + 1); }
  double diameter() const;
  void validate() const;
};

struct MonteCarloTail {
  /// Fraction of trials with W_p >= eps.
  double frequency;
  double frequency_stderr;
  double mean_wp;
  double mean_wp_stderr;
  /// Mean of W_p^p.
  double mean_wp_pow;
  double mean_wp_pow_stderr;
  std::size_t trials;
};

/// Per-trial W_p(sum_t w_t delta_{xi_t}, P_{T+1}) with xi_t ~ P_t
/// independently. Trial i draws from stream i of `seed`.
std::vector<double> sample_weighted_distances(const DriftSequenceSpec& spec, const WeightVector& w, double p,
                                              std::size_t trials, std::uint64_t seed);
std::vector<double> sample_weighted_distances_serial(const DriftSequenceSpec& spec, const WeightVector& w, double p,
                                                     std::size_t trials, std::uint64_t seed);

/// OpenMP-parallel over trials; bitwise equal to monte_carlo_tail_serial.
MonteCarloTail monte_carlo_tail(const DriftSequenceSpec& spec, const WeightVector& w, double p, double eps,
                                std::size_t trials, std::uint64_t seed);
MonteCarloTail monte_carlo_tail_serial(const DriftSequenceSpec& spec, const WeightVector& w, double p, double eps,
                                       std::size_t trials, std::uint64_t seed);

/// Empirical (1 - beta)-quantile of sampled distances with a distribution-free
/// band from order statistics at +/- z binomial standard errors.
struct QuantileEstimate {
  double value;
  double lower;
  double upper;
};
QuantileEstimate empirical_upper_quantile(std::vector<double> samples, double beta, double z = 3.0);

/// Fitted constants for the stationary bounds.
struct Calibration {
  double c0;  // sup over the grid of (mean W_p^p + 3 se) N^q
  double c1;  // largest rate keeping empirical tail + 3 se below the bound
  double q;
};

/// Calibrates c0 (expectation bound) and then c1 (tail bound, with c2 := c0)
/// on uniform weightings of lengths `sizes` and radii `eps_grid`.
Calibration calibrate(DriftSequenceSpec spec, const BoundParams& bp, std::span<const std::size_t> sizes,
                      std::span<const double> eps_grid, std::size_t trials, std::uint64_t seed);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values);

}  // namespace wdro
