// Observation weightings over a look-back history and the concentration
// trade-off they are chosen to maximize.
//
// Index convention: position 0 holds t = 1 (oldest observation) and position
// T - 1 holds t = T (most recent). The look-back index of position i is
// T - i, so the newest observation has look-back 1.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wdro {

/// Allowed deviation of the weight total from one.
inline constexpr double kWeightSumTolerance = 1e-12;

/// Nonnegative weights summing to one over a history of length T >= 1.
class WeightVector {
 public:
  /// Throws std::invalid_argument unless every weight is finite and >= 0 and
  /// the total is within kWeightSumTolerance of one.
  explicit WeightVector(std::vector<double> w);

  static WeightVector uniform(std::size_t T);
  /// All mass on the most recent observation.
  static WeightVector most_recent(std::size_t T);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const { return w_; }
  /// Weight of look-back index k in [1, T] (k = 1 is the newest).
  double at_lookback(std::size_t k) const { return w_[w_.size() - k]; }
  /// Number of nonzero weights counted from the newest backwards until the
  /// first zero.
  std::size_t recent_support() const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> w_;
};

/// A weight-selection problem. Only the ratio eps/rho matters.
struct TradeoffInstance {
  std::size_t T;
  double p;
  double eps_over_rho;

  TradeoffInstance(std::size_t T, double p, double eps_over_rho);
  /// Builds the instance from the radius and drift bound separately.
  static TradeoffInstance from_radii(std::size_t T, double p, double eps, double rho);
};

/// N_eff(w) = 1 / sum_t w_t^2.
double effective_sample_size(const WeightVector& w);

/// D_p(w) = (sum_t w_t (T - t + 1)^p)^(1/p).
double weighted_drift(const WeightVector& w, double p);

/// N_eff(w) * (eps/rho - D_p(w))_+^(2p), i.e. the exponent magnitude of the
/// drifting tail bound with rho scaled to one.
double concentration_objective(const WeightVector& w, const TradeoffInstance& inst);

/// Equal weights on the s most recent observations.
WeightVector window_weights(std::size_t T, std::size_t s);

/// Exponential smoothing: w_{T-k} proportional to alpha (1 - alpha)^k,
/// renormalized over the available history. alpha = 0 gives uniform weights.
WeightVector smoothing_weights(std::size_t T, double alpha);

/// Closed-form optimum for p = 1: triangular weights on the s = min(floor(eps/rho), T)
/// most recent observations. Throws std::domain_error when eps/rho <= 1.
WeightVector optimal_weights_p1(const TradeoffInstance& inst);

/// Triangular p = 1 weights on a window of exactly s observations, i.e. the
/// closed form evaluated at eps/rho = s + 1 (the weight at look-back s + 1 vanishes).
WeightVector triangular_weights(std::size_t T, std::size_t s);

struct OptimalWeights {
  WeightVector w;
  double objective = 0.0;
  /// Number of positive weights.
  std::size_t support = 0;
  /// Parameters of w_t = (c1 - c2 (T - t + 1)^p)_+ on the support.
  double c1 = 0.0;
  double c2 = 0.0;
  /// True when eps/rho <= 1: every weighting has objective zero and the
  /// most-recent point mass is returned by convention.
  bool degenerate = false;
};

/// Maximizes concentration_objective over the simplex by searching the family
/// of truncated polynomial weights: for each support size S a line search over
/// the admissible c2 interval (64-point grid, golden-section refinement, then a
/// root polish of the stationarity condition). Ties keep the smallest S.
OptimalWeights optimal_weights(const TradeoffInstance& inst);

/// Optimal window length for p = 1: the better of floor and ceil of
/// (2 eps/rho - 1) / 3 after projection onto [1, T]; ties keep the smaller.
std::size_t optimal_window_size(const TradeoffInstance& inst);

/// Windowed objective s (eps/rho - (s + 1)/2)_+^2.
double window_objective(std::size_t s, double eps_over_rho);

/// Asymptotic (T -> infinity) optimal smoothing rate for p = 1:
/// 3 / (eps/rho + 1) projected onto [min(rho/eps, 1), 1].
double optimal_smoothing_rate(double eps_over_rho);

/// Asymptotic smoothing objective (2/alpha - 1)(eps/rho - 1/alpha)_+^2.
double smoothing_objective(double alpha, double eps_over_rho);

}  // namespace wdro
