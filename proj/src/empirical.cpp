#include "wdro/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wdro/weights.hpp"

namespace wdro {

namespace {

void require_order(double p, const char* where) {
  if (!std::isfinite(p) || p < 1.0) {
    throw std::invalid_argument(std::string(where) + ": order p must be finite and >= 1, got " + std::to_string(p));
  }
}

double abs_pow(double x, double p) {
  const double a = std::fabs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

// Antiderivative of |y - x|^p in y.
double signed_pow_integral(double y, double x, double p) {
  const double d = y - x;
  const double mag = std::pow(std::fabs(d), p + 1.0) / (p + 1.0);
  return d < 0 ? -mag : mag;
}

double adaptive_simpson(const auto& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double simpson(const auto& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

}  // namespace

DiscreteDistribution1D::DiscreteDistribution1D(std::vector<double> atoms, std::vector<double> masses) {
  if (atoms.size() != masses.size()) {
    throw std::invalid_argument("DiscreteDistribution1D: atoms and masses differ in length");
  }
  if (atoms.empty()) throw std::invalid_argument("DiscreteDistribution1D: no atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i])) throw std::invalid_argument("DiscreteDistribution1D: non-finite atom");
    if (!std::isfinite(masses[i]) || masses[i] < 0.0) {
      throw std::invalid_argument("DiscreteDistribution1D: masses must be finite and nonnegative");
    }
    total += masses[i];
  }
  if (std::fabs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("DiscreteDistribution1D: masses sum to " + std::to_string(total) + ", expected 1");
  }

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  atoms_.reserve(atoms.size());
  masses_.reserve(atoms.size());
  for (std::size_t idx : order) {
    if (masses[idx] == 0.0) continue;
    if (!atoms_.empty() && atoms[idx] - atoms_.back() <= kAtomMergeTolerance) {
      masses_.back() += masses[idx];
    } else {
      atoms_.push_back(atoms[idx]);
      masses_.push_back(masses[idx]);
    }
  }
  cumulative_.resize(masses_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    acc += masses_[i];
    cumulative_[i] = acc;
  }
  cumulative_.back() = 1.0;
}

DiscreteDistribution1D DiscreteDistribution1D::point_mass(double location) { return {{location}, {1.0}}; }

DiscreteDistribution1D DiscreteDistribution1D::uniform_on(std::span<const double> points) {
  if (points.empty()) throw std::invalid_argument("uniform_on: no points");
  const double m = 1.0 / static_cast<double>(points.size());
  return {std::vector<double>(points.begin(), points.end()), std::vector<double>(points.size(), m)};
}

double DiscreteDistribution1D::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) acc += masses_[i] * atoms_[i];
  return acc;
}

double DiscreteDistribution1D::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("quantile: u must lie in (0, 1]");
  // Levels within kMassTolerance of a cumulative value count as reaching it.
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u - kMassTolerance);
  if (it == cumulative_.end()) --it;
  return atoms_[static_cast<std::size_t>(it - cumulative_.begin())];
}

DiscreteDistribution1D DiscreteDistribution1D::shifted(double offset) const {
  DiscreteDistribution1D out = *this;
  for (double& a : out.atoms_) a += offset;
  return out;
}

UniformLaw::UniformLaw(double lo, double hi) : lower(lo), upper(hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw std::invalid_argument("UniformLaw: requires finite lower < upper");
  }
}

UniformLaw UniformLaw::from_moments(double mean, double stddev) {
  if (!(stddev > 0.0)) throw std::invalid_argument("UniformLaw::from_moments: stddev must be positive");
  const double half = stddev * std::sqrt(3.0);
  return {mean - half, mean + half};
}

DiscreteDistribution1D make_weighted_empirical(std::span<const double> observations, const WeightVector& w) {
  if (observations.size() != w.size()) {
    throw std::invalid_argument("make_weighted_empirical: " + std::to_string(observations.size()) +
                                " observations but " + std::to_string(w.size()) + " weights");
  }
  const auto values = w.values();
  return {std::vector<double>(observations.begin(), observations.end()),
          std::vector<double>(values.begin(), values.end())};
}

double wasserstein_p(const DiscreteDistribution1D& P, const DiscreteDistribution1D& Q, double p) {
  require_order(p, "wasserstein_p");
  const auto xa = P.atoms();
  const auto xb = Q.atoms();
  const auto ca = P.cumulative();
  const auto cb = Q.cumulative();
  std::size_t i = 0;
  std::size_t j = 0;
  double u = 0.0;
  double acc = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double next = std::min(ca[i], cb[j]);
    const double du = next - u;
    if (du > 0.0) acc += du * abs_pow(xa[i] - xb[j], p);
    u = next;
    if (ca[i] <= next) ++i;
    if (cb[j] <= next) ++j;
  }
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double wasserstein_inf(const DiscreteDistribution1D& P, const DiscreteDistribution1D& Q) {
  const auto xa = P.atoms();
  const auto xb = Q.atoms();
  const auto ca = P.cumulative();
  const auto cb = Q.cumulative();
  std::size_t i = 0;
  std::size_t j = 0;
  double u = 0.0;
  double best = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double next = std::min(ca[i], cb[j]);
    if (next - u > kMassTolerance) best = std::max(best, std::fabs(xa[i] - xb[j]));
    u = next;
    if (ca[i] <= next) ++i;
    if (cb[j] <= next) ++j;
  }
  return best;
}

double wasserstein_p_point(const DiscreteDistribution1D& Q, double c, double p) {
  require_order(p, "wasserstein_p_point");
  const auto atoms = Q.atoms();
  const auto masses = Q.masses();
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) acc += masses[i] * abs_pow(atoms[i] - c, p);
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double wasserstein_p_point(const UniformLaw& Q, double c, double p) {
  require_order(p, "wasserstein_p_point");
  if (p == 2.0) {
    const double d = Q.midpoint() - c;
    return std::sqrt(d * d + Q.width() * Q.width() / 12.0);
  }
  const double moment =
      (signed_pow_integral(Q.upper, c, p) - signed_pow_integral(Q.lower, c, p)) / Q.width();
  return std::pow(moment, 1.0 / p);
}

double wasserstein_p_uniform(const DiscreteDistribution1D& P, const UniformLaw& U, double p) {
  require_order(p, "wasserstein_p_uniform");
  const auto atoms = P.atoms();
  const auto cum = P.cumulative();
  double acc = 0.0;
  double u0 = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double y0 = U.quantile(u0);
    const double y1 = U.quantile(cum[i]);
    acc += signed_pow_integral(y1, atoms[i], p) - signed_pow_integral(y0, atoms[i], p);
    u0 = cum[i];
  }
  acc /= U.width();
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double wasserstein_p_uniform_quadrature(const DiscreteDistribution1D& P, const UniformLaw& U, double p,
                                        double tolerance) {
  require_order(p, "wasserstein_p_uniform_quadrature");
  const auto atoms = P.atoms();
  const auto cum = P.cumulative();
  const double per_segment_tol = tolerance / static_cast<double>(2 * atoms.size());
  double acc = 0.0;
  double u0 = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double x = atoms[i];
    const auto integrand = [&](double u) { return abs_pow(x - U.quantile(u), p); };
    const double u1 = cum[i];
    // Split at the kink where the uniform quantile crosses the atom.
    const double kink = (x - U.lower) / U.width();
    if (kink > u0 && kink < u1) {
      acc += simpson(integrand, u0, kink, per_segment_tol) + simpson(integrand, kink, u1, per_segment_tol);
    } else {
      acc += simpson(integrand, u0, u1, per_segment_tol);
    }
    u0 = u1;
  }
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

}  // namespace wdro
