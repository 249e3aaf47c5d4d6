// Discrete laws on the real line and exact one-dimensional transport distances.
//
// Every distance is computed through quantile functions: in 1-D the monotone
// rearrangement is an optimal coupling for every order p >= 1, so the
// distance reduces to an integral over u in (0,1) that is a finite sum over
// the merged breakpoints of the two step quantile functions.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wdro {

class WeightVector;

/// Atoms closer than this are merged during canonicalization.
inline constexpr double kAtomMergeTolerance = 1e-12;
/// Allowed deviation of the total mass from one.
inline constexpr double kMassTolerance = 1e-12;

/// Finite weighted atom set on the real line, always held in canonical form:
/// atoms strictly increasing, masses positive and summing to one.
class DiscreteDistribution1D {
 public:
  /// Validates and canonicalizes (sorts, merges near-duplicates, drops zero
  /// masses). Throws std::invalid_argument on negative or non-finite masses,
  /// size mismatch, or a total mass off by more than kMassTolerance.
  DiscreteDistribution1D(std::vector<double> atoms, std::vector<double> masses);

  static DiscreteDistribution1D point_mass(double location);
  /// Equal masses on `points` (duplicates merge).
  static DiscreteDistribution1D uniform_on(std::span<const double> points);

  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> masses() const { return masses_; }
  /// cumulative()[i] = F(atoms()[i]); the last entry is exactly 1.
  std::span<const double> cumulative() const { return cumulative_; }
  std::size_t size() const { return atoms_.size(); }

  double mean() const;
  /// Left-continuous quantile inf{x : F(x) >= u - kMassTolerance} for u in (0, 1].
  double quantile(double u) const;
  double min() const { return atoms_.front(); }
  double max() const { return atoms_.back(); }

  /// Copy with every atom shifted by `offset`.
  DiscreteDistribution1D shifted(double offset) const;

  friend bool operator==(const DiscreteDistribution1D&, const DiscreteDistribution1D&) = default;

 private:
  DiscreteDistribution1D() = default;
  std::vector<double> atoms_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

/// Uniform law on [lower, upper], lower < upper.
struct UniformLaw {
  double lower;
  double upper;

  UniformLaw(double lower, double upper);
  /// Uniform law with the given mean and standard deviation (> 0).
  static UniformLaw from_moments(double mean, double stddev);

  double midpoint() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
  double quantile(double u) const { return lower + (upper - lower) * u; }
};

/// Sum_t w_t delta_{observations[t]} in canonical form.
DiscreteDistribution1D make_weighted_empirical(std::span<const double> observations, const WeightVector& w);

/// W_p between two discrete laws, exact (finite p >= 1).
double wasserstein_p(const DiscreteDistribution1D& P, const DiscreteDistribution1D& Q, double p);

/// W_infinity: the largest quantile gap over segments of positive length.
/// Segments shorter than kMassTolerance are treated as rounding slivers.
double wasserstein_inf(const DiscreteDistribution1D& P, const DiscreteDistribution1D& Q);

/// W_p(Q, delta_c) = (E_Q |xi - c|^p)^(1/p).
double wasserstein_p_point(const DiscreteDistribution1D& Q, double c, double p);
double wasserstein_p_point(const UniformLaw& Q, double c, double p);

/// W_p(P, U) with P discrete and U uniform. The integrand |F_P^-1(u) - F_U^-1(u)|^p
/// is integrated exactly segment by segment through its antiderivative.
double wasserstein_p_uniform(const DiscreteDistribution1D& P, const UniformLaw& U, double p);

/// Same distance by composite adaptive Simpson quadrature of the quantile
/// integral (absolute tolerance `tolerance` on the p-th power).
double wasserstein_p_uniform_quadrature(const DiscreteDistribution1D& P, const UniformLaw& U, double p,
                                        double tolerance = 1e-8);

}  // namespace wdro
