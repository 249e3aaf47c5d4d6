#include "wdro/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wdro {

namespace {

double lookback_pow(std::size_t k, double p) {
  const double base = static_cast<double>(k);
  if (p == 1.0) return base;
  if (p == 2.0) return base * base;
  return std::pow(base, p);
}

// Truncated-polynomial weights restricted to a fixed support size S. With
// a_k = k^p for look-back k in [1, S], normalization fixes
// w_k(c2) = 1/S + c2 (M - a_k) where M is the mean of a_k, so that
//   sum_k w_k^2 = 1/S + c2^2 V   and   D_p^p = M - c2 V,
// with V = sum_k (a_k - M)^2. Both only hold while every w_k >= 0, which is
// the case on the admissible c2 interval.
struct SupportFamily {
  std::size_t S;
  double p;
  double r;  // eps / rho
  double M;
  double V;

  double drift(double c2) const {
    const double dp = std::max(M - c2 * V, 1.0);
    return p == 1.0 ? dp : std::pow(dp, 1.0 / p);
  }

  // Log of the objective; -inf where the positive part clamps to zero.
  double log_objective(double c2) const {
    const double gap = r - drift(c2);
    if (!(gap > 0.0)) return -std::numeric_limits<double>::infinity();
    return 2.0 * p * std::log(gap) - std::log(1.0 / static_cast<double>(S) + c2 * c2 * V);
  }

  // Negative where log_objective increases in c2, positive where it decreases.
  double stationarity(double c2) const {
    const double d = drift(c2);
    const double inv_neff = 1.0 / static_cast<double>(S) + c2 * c2 * V;
    return c2 * (r - d) - std::pow(d, 1.0 - p) * inv_neff;
  }
};

struct LineSearchResult {
  double c2;
  double log_objective;
};

LineSearchResult search_support(const SupportFamily& fam, double lo, double hi) {
  constexpr int kGridPoints = 64;
  const auto at = [&](int i) { return lo + (hi - lo) * static_cast<double>(i) / (kGridPoints - 1); };

  int best_i = 0;
  double best_val = fam.log_objective(lo);
  for (int i = 1; i < kGridPoints; ++i) {
    const double v = fam.log_objective(at(i));
    if (v > best_val) {
      best_val = v;
      best_i = i;
    }
  }
  LineSearchResult best{at(best_i), best_val};
  if (!std::isfinite(best_val)) return best;

  const double a0 = at(std::max(best_i - 1, 0));
  const double b0 = at(std::min(best_i + 1, kGridPoints - 1));

  // Golden-section refinement on the bracketing grid cells.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = a0;
  double b = b0;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = fam.log_objective(x1);
  double f2 = fam.log_objective(x2);
  const double width_tol = 1e-12 * std::max(hi - lo, std::numeric_limits<double>::min());
  while (b - a > width_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = fam.log_objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = fam.log_objective(x1);
    }
  }
  const double golden = 0.5 * (a + b);
  const double golden_val = fam.log_objective(golden);
  if (golden_val > best.log_objective) best = {golden, golden_val};

  // The golden-section argmax is only accurate to about sqrt(machine eps);
  // bisect the stationarity condition when the bracket straddles a root.
  double left = a0;
  double right = b0;
  double g_left = fam.stationarity(left);
  double g_right = fam.stationarity(right);
  if (g_left < 0.0 && g_right > 0.0) {
    for (int it = 0; it < 200 && right - left > 0.0; ++it) {
      const double mid = 0.5 * (left + right);
      if (mid <= left || mid >= right) break;
      const double g_mid = fam.stationarity(mid);
      if (g_mid < 0.0) {
        left = mid;
        g_left = g_mid;
      } else {
        right = mid;
        g_right = g_mid;
      }
    }
    const double root = 0.5 * (left + right);
    const double root_val = fam.log_objective(root);
    if (root_val >= best.log_objective) best = {root, root_val};
  }
  return best;
}

}  // namespace

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw std::invalid_argument("WeightVector: history length must be at least 1");
  double total = 0.0;
  for (double v : w_) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("WeightVector: weights must be finite and >= 0");
    total += v;
  }
  if (std::fabs(total - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument("WeightVector: weights sum to " + std::to_string(total) + ", expected 1");
  }
}

WeightVector WeightVector::uniform(std::size_t T) {
  if (T == 0) throw std::invalid_argument("WeightVector::uniform: T must be positive");
  return WeightVector(std::vector<double>(T, 1.0 / static_cast<double>(T)));
}

WeightVector WeightVector::most_recent(std::size_t T) {
  if (T == 0) throw std::invalid_argument("WeightVector::most_recent: T must be positive");
  std::vector<double> w(T, 0.0);
  w.back() = 1.0;
  return WeightVector(std::move(w));
}

std::size_t WeightVector::recent_support() const {
  std::size_t k = 0;
  while (k < w_.size() && w_[w_.size() - 1 - k] > 0.0) ++k;
  return k;
}

TradeoffInstance::TradeoffInstance(std::size_t T_, double p_, double ratio) : T(T_), p(p_), eps_over_rho(ratio) {
  if (T == 0) throw std::invalid_argument("TradeoffInstance: T must be positive");
  if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument("TradeoffInstance: p must be finite and >= 1");
  if (!(eps_over_rho > 0.0) || std::isnan(eps_over_rho)) {
    throw std::invalid_argument("TradeoffInstance: eps_over_rho must be positive");
  }
}

TradeoffInstance TradeoffInstance::from_radii(std::size_t T, double p, double eps, double rho) {
  if (!(eps > 0.0) || !(rho > 0.0)) throw std::invalid_argument("TradeoffInstance::from_radii: eps, rho must be > 0");
  return {T, p, eps / rho};
}

double effective_sample_size(const WeightVector& w) {
  double sq = 0.0;
  for (double v : w.values()) sq += v * v;
  return 1.0 / sq;
}

double weighted_drift(const WeightVector& w, double p) {
  const std::size_t T = w.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < T; ++i) acc += w[i] * lookback_pow(T - i, p);
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double concentration_objective(const WeightVector& w, const TradeoffInstance& inst) {
  const double gap = inst.eps_over_rho - weighted_drift(w, inst.p);
  if (!(gap > 0.0)) return 0.0;
  return effective_sample_size(w) * std::pow(gap, 2.0 * inst.p);
}

WeightVector window_weights(std::size_t T, std::size_t s) {
  if (T == 0 || s < 1 || s > T) {
    throw std::invalid_argument("window_weights: window " + std::to_string(s) + " outside [1, " + std::to_string(T) +
                                "]");
  }
  std::vector<double> w(T, 0.0);
  for (std::size_t i = T - s; i < T; ++i) w[i] = 1.0 / static_cast<double>(s);
  return WeightVector(std::move(w));
}

WeightVector smoothing_weights(std::size_t T, double alpha) {
  if (T == 0) throw std::invalid_argument("smoothing_weights: T must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("smoothing_weights: alpha outside [0, 1]");
  std::vector<double> w(T, 0.0);
  double decay = 1.0;
  double total = 0.0;
  for (std::size_t k = 0; k < T; ++k) {
    w[T - 1 - k] = decay;
    total += decay;
    decay *= 1.0 - alpha;
  }
  for (double& v : w) v /= total;
  return WeightVector(std::move(w));
}

WeightVector optimal_weights_p1(const TradeoffInstance& inst) {
  if (inst.p != 1.0) throw std::invalid_argument("optimal_weights_p1: requires p = 1");
  const double r = inst.eps_over_rho;
  if (!(r > 1.0)) throw std::domain_error("optimal_weights_p1: requires eps/rho > 1");
  const std::size_t s = std::min(static_cast<std::size_t>(std::floor(r)), inst.T);
  const double sd = static_cast<double>(s);
  const double denom = sd * (2.0 * r - sd - 1.0);
  std::vector<double> w(inst.T, 0.0);
  for (std::size_t k = 1; k <= s; ++k) w[inst.T - k] = 2.0 * (r - static_cast<double>(k)) / denom;
  return WeightVector(std::move(w));
}

WeightVector triangular_weights(std::size_t T, std::size_t s) {
  if (s < 1 || s > T) throw std::invalid_argument("triangular_weights: support outside [1, T]");
  const double sd = static_cast<double>(s);
  std::vector<double> w(T, 0.0);
  for (std::size_t k = 1; k <= s; ++k) w[T - k] = 2.0 * (sd + 1.0 - static_cast<double>(k)) / (sd * (sd + 1.0));
  return WeightVector(std::move(w));
}

OptimalWeights optimal_weights(const TradeoffInstance& inst) {
  const std::size_t T = inst.T;
  const double p = inst.p;
  const double r = inst.eps_over_rho;
  if (r <= 1.0) {
    OptimalWeights out{WeightVector::most_recent(T)};
    out.support = 1;
    out.c1 = 1.0;
    out.degenerate = true;
    return out;
  }

  std::vector<double> a(T + 2);
  for (std::size_t k = 1; k <= T + 1; ++k) a[k] = lookback_pow(k, p);

  // S = 1 is the point mass on the newest observation.
  std::size_t best_S = 1;
  double best_c2 = 0.0;
  double best_log = 2.0 * p * std::log(r - 1.0);

  double prefix = a[1];
  for (std::size_t S = 2; S <= T; ++S) {
    prefix += a[S];
    const double Sd = static_cast<double>(S);
    const double M = prefix / Sd;
    double V = 0.0;
    for (std::size_t k = 1; k <= S; ++k) V += (a[k] - M) * (a[k] - M);

    // c2 at which the weight at look-back S (upper end) or S + 1 (lower end) vanishes.
    const double hi = 1.0 / (Sd * a[S] - prefix);
    const double lo = S < T ? 1.0 / (Sd * a[S + 1] - prefix) : 0.0;
    const SupportFamily fam{S, p, r, M, V};
    const LineSearchResult res = search_support(fam, lo, hi);
    if (res.log_objective > best_log) {
      best_log = res.log_objective;
      best_S = S;
      best_c2 = res.c2;
    }
  }

  std::vector<double> w(T, 0.0);
  double c1 = 1.0;
  if (best_S > 1) {
    double prefix_s = 0.0;
    for (std::size_t k = 1; k <= best_S; ++k) prefix_s += a[k];
    const double Sd = static_cast<double>(best_S);
    c1 = (1.0 + best_c2 * prefix_s) / Sd;
    double total = 0.0;
    for (std::size_t k = 1; k <= best_S; ++k) {
      const double v = std::max(0.0, 1.0 / Sd + best_c2 * (prefix_s / Sd - a[k]));
      w[T - k] = v;
      total += v;
    }
    for (double& v : w) v /= total;
  } else {
    w.back() = 1.0;
  }

  OptimalWeights out{WeightVector(std::move(w))};
  out.objective = concentration_objective(out.w, inst);
  out.support = static_cast<std::size_t>(
      std::count_if(out.w.values().begin(), out.w.values().end(), [](double v) { return v > 0.0; }));
  out.c1 = c1;
  out.c2 = best_c2;
  return out;
}

double window_objective(std::size_t s, double eps_over_rho) {
  const double gap = eps_over_rho - 0.5 * (static_cast<double>(s) + 1.0);
  return gap > 0.0 ? static_cast<double>(s) * gap * gap : 0.0;
}

std::size_t optimal_window_size(const TradeoffInstance& inst) {
  const double x = (2.0 * inst.eps_over_rho - 1.0) / 3.0;
  const auto project = [&](double v) {
    return static_cast<std::size_t>(std::clamp(v, 1.0, static_cast<double>(inst.T)));
  };
  const std::size_t a = project(std::floor(x));
  const std::size_t b = project(std::ceil(x));
  const std::size_t lo = std::min(a, b);
  const std::size_t hi = std::max(a, b);
  return window_objective(hi, inst.eps_over_rho) > window_objective(lo, inst.eps_over_rho) ? hi : lo;
}

double optimal_smoothing_rate(double eps_over_rho) {
  if (!(eps_over_rho > 0.0)) throw std::invalid_argument("optimal_smoothing_rate: eps_over_rho must be positive");
  const double lower = std::clamp(1.0 / eps_over_rho, 0.0, 1.0);
  return std::clamp(3.0 / (eps_over_rho + 1.0), lower, 1.0);
}

double smoothing_objective(double alpha, double eps_over_rho) {
  if (!(alpha > 0.0)) return 0.0;
  const double gap = eps_over_rho - 1.0 / alpha;
  return gap > 0.0 ? (2.0 / alpha - 1.0) * gap * gap : 0.0;
}

}  // namespace wdro
