// Worst-case expected piecewise-affine loss over Wasserstein ambiguity sets on
// an interval, and the robust newsvendor order built on it.
#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "wdro/empirical.hpp"

namespace wdro {

struct AffinePiece {
  double slope;
  double intercept;
};

/// l(xi) = max_k (a_k xi + b_k).
class PiecewiseAffineLoss {
 public:
  /// Throws std::invalid_argument when empty or non-finite.
  explicit PiecewiseAffineLoss(std::vector<AffinePiece> pieces);
  /// Newsvendor cost of ordering x: max(c_u (xi - x), c_o (x - xi)).
  static PiecewiseAffineLoss newsvendor(double x, double c_u, double c_o);

  double operator()(double xi) const;
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  double max_abs_slope() const;
  /// Points in (lo, hi) where the active piece changes.
  std::vector<double> kinks_in(double lo, double hi) const;

 private:
  std::vector<AffinePiece> pieces_;
};

/// {Q on [lo, hi] : W_p(center, Q) <= eps}.
struct WeightedBall {
  DiscreteDistribution1D center;
  double eps;
  double p;
  double lo;
  double hi;
  void validate() const;
};

/// Intersection over t of {Q on [lo, hi] : W_p(delta_{points[t]}, Q) <= radii[t]}.
struct IntersectionSet {
  std::vector<double> points;
  std::vector<double> radii;
  double p;
  double lo;
  double hi;
  void validate() const;
};

using AmbiguitySpec = std::variant<WeightedBall, IntersectionSet>;

/// Lagrangian dual inf_{lambda >= 0} lambda eps^p + sum_t w_t sup_xi (l(xi) - lambda |xi - xi_t|^p)
/// with the inner supremum in closed form and golden section over lambda.
double worst_case_dual(const PiecewiseAffineLoss& loss, const WeightedBall& ball);

/// Primal transport LP over a uniform grid of G points augmented with the
/// center atoms and the loss kinks.
double worst_case_grid_lp(const PiecewiseAffineLoss& loss, const WeightedBall& ball, std::size_t grid_size);

struct IntersectionValue {
  double value;
  /// Number of times every radius was doubled to make the set nonempty.
  int doublings;
};

/// LP over one grid distribution satisfying every per-point moment
/// constraint. Radii are doubled until the set is nonempty (at most 64 times);
/// throws std::runtime_error if it stays empty.
IntersectionValue worst_case_intersection(const PiecewiseAffineLoss& loss, const IntersectionSet& set,
                                          std::size_t grid_size);

/// Grid LP for a weighted ball that keeps its basis between evaluations with
/// different losses over the same ambiguity set.
class GridBallSolver {
 public:
  GridBallSolver(WeightedBall ball, std::size_t grid_size);
  ~GridBallSolver();
  GridBallSolver(GridBallSolver&&) noexcept;
  GridBallSolver& operator=(GridBallSolver&&) noexcept;
  double evaluate(const PiecewiseAffineLoss& loss);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Same idea for an intersection set. The doubling happens at construction.
class IntersectionSolver {
 public:
  IntersectionSolver(IntersectionSet set, std::size_t grid_size);
  ~IntersectionSolver();
  IntersectionSolver(IntersectionSolver&&) noexcept;
  IntersectionSolver& operator=(IntersectionSolver&&) noexcept;
  int doublings() const;
  double evaluate(const PiecewiseAffineLoss& loss);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class DroMethod { Dual, Grid };
std::string_view to_string(DroMethod m);
/// Throws std::invalid_argument on an unknown tag.
DroMethod parse_dro_method(std::string_view tag);

struct OrderDecision {
  double x;
  double value;
  int doublings = 0;
};

/// Minimizes the worst-case expected newsvendor cost over x in [lo, hi] by
/// golden section (tolerance 1e-6), then returns the leftmost x whose value
/// is within 1e-9 (1 + |v|) of the minimum, moved onto an adjacent center
/// atom when that atom is also near-optimal. Intersection sets always use the
/// grid LP.
OrderDecision newsvendor_order(const AmbiguitySpec& spec, double c_u, double c_o, DroMethod method,
                               std::size_t grid_size = 2001);

/// Classical critical-fractile order: the c_u/(c_u + c_o) quantile.
double saa_order(const DiscreteDistribution1D& empirical, double c_u, double c_o);

/// Golden-section minimizer of a unimodal function on [a, b]; returns the
/// best point evaluated and its value.
struct ScalarMinimum {
  double x;
  double value;
};
template <class F>
ScalarMinimum golden_section(F&& f, double a, double b, double tolerance);

}  // namespace wdro

#include "wdro/detail/golden.hpp"
