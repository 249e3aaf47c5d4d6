#include "wdro/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wdro/rng.hpp"

namespace wdro {

BoundParams BoundParams::make(int m, double p, std::optional<double> delta, std::optional<double> diam) {
  if (m < 1) throw std::invalid_argument("BoundParams: m must be positive");
  if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument("BoundParams: p must be finite and >= 1");
  const double ratio = p / static_cast<double>(m);
  const double d = delta.value_or(ratio >= 0.5 ? 1e-3 : 0.0);
  if (d < 0.0) throw std::invalid_argument("BoundParams: delta must be nonnegative");
  BoundParams bp;
  bp.m = m;
  bp.p = p;
  bp.q = std::min(ratio, 0.5) - d;
  if (diam) {
    bp.diam = *diam;
    bp.c1 = 2.0 * std::pow(*diam, -2.0 * p);
  }
  bp.validate();
  return bp;
}

void BoundParams::validate() const {
  if (m < 1) throw std::invalid_argument("BoundParams: m must be positive");
  if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument("BoundParams: p must be finite and >= 1");
  if (!(q > 0.0 && q < 0.5)) throw std::invalid_argument("BoundParams: q must lie in (0, 1/2)");
  if (q > p / static_cast<double>(m)) throw std::invalid_argument("BoundParams: q must not exceed p/m");
  if (!(c0 > 0.0 && c1 > 0.0 && c2 > 0.0)) throw std::invalid_argument("BoundParams: constants must be positive");
  if (!(diam > 0.0)) throw std::invalid_argument("BoundParams: diam must be positive");
}

double stationary_tail_bound(double n_eff, double eps, const BoundParams& bp) {
  const double margin = std::pow(eps, bp.p) - bp.c2 * std::pow(n_eff, -bp.q);
  const double clamped = margin > 0.0 ? margin : 0.0;
  return std::min(1.0, std::exp(-bp.c1 * n_eff * clamped * clamped));
}

double stationary_tail_bound_clean(double n_eff, double eps, const BoundParams& bp) {
  return std::min(1.0, std::exp(-0.25 * bp.c1 * n_eff * std::pow(eps, 2.0 * bp.p)));
}

bool clean_tail_applies(double n_eff, double eps, const BoundParams& bp) {
  return eps >= 2.0 * std::pow(bp.c2 * std::pow(n_eff, -bp.q), 1.0 / bp.p);
}

double drift_tail_bound(const WeightVector& w, double eps, double rho, const BoundParams& bp) {
  if (rho < 0.0) throw std::invalid_argument("drift_tail_bound: rho must be nonnegative");
  const double shifted = eps - weighted_drift(w, bp.p) * rho;
  return stationary_tail_bound(effective_sample_size(w), shifted > 0.0 ? shifted : 0.0, bp);
}

double drift_radius(const WeightVector& w, double beta, double rho, const BoundParams& bp) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("drift_radius: beta must lie in (0, 1)");
  const double n_eff = effective_sample_size(w);
  const double need = bp.c2 * std::pow(n_eff, -bp.q) + std::sqrt(std::log(1.0 / beta) / (bp.c1 * n_eff));
  return weighted_drift(w, bp.p) * rho + std::pow(need, 1.0 / bp.p);
}

std::string_view to_string(DriftRegime r) {
  return r == DriftRegime::SmallDrift ? "small-drift" : "large-drift";
}

double drift_threshold(double beta, const RadiusParams& rp) {
  return std::sqrt(12.0 / rp.rate * std::log(1.0 / beta));
}

ConfidenceRadius confidence_radius(double beta, double rho, std::size_t T, const RadiusParams& rp) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("confidence_radius: beta must lie in (0, 1)");
  if (!(rho >= 0.0)) throw std::invalid_argument("confidence_radius: rho must be nonnegative");
  if (!(rp.rate > 0.0 && rp.bias > 0.0 && rp.q > 0.0 && rp.q < 0.5)) {
    throw std::invalid_argument("confidence_radius: constants must be positive and q in (0, 1/2)");
  }
  const double L = std::log(1.0 / beta);
  const double rho_star = drift_threshold(beta, rp);
  if (rho >= rho_star) {
    return {rho + std::sqrt(L / rp.rate) + rp.bias, DriftRegime::LargeDrift, 1, rho_star};
  }
  const double s_star = std::cbrt(12.0 / rp.rate * L / (rho * rho));
  if (!(static_cast<double>(T) >= s_star)) {
    throw std::invalid_argument("confidence_radius: history length T = " + std::to_string(T) +
                                " is below the required T >= " + std::to_string(s_star));
  }
  const double c3 = 4.0 / 3.0 * std::cbrt(12.0 / rp.rate) + 2.0 / std::sqrt(3.0) * std::cbrt(1.0 / (std::sqrt(12.0) * rp.rate));
  const double c4 = rp.bias * std::pow(4.0 / 3.0, rp.q) * std::pow(12.0 / rp.rate, -rp.q / 3.0);
  const double radius = c3 * std::cbrt(rho * L) + c4 * std::cbrt(std::pow(rho, 2.0 * rp.q) * std::pow(L, -rp.q));
  return {radius, DriftRegime::SmallDrift, static_cast<std::size_t>(std::ceil(s_star)), rho_star};
}

IntersectionRadii intersection_radii(std::size_t T, double rho, const std::function<double(double)>& eps_single,
                                     std::span<const double> betas) {
  if (T == 0) throw std::invalid_argument("intersection_radii: T must be positive");
  if (betas.size() != T) throw std::invalid_argument("intersection_radii: need one violation level per observation");
  if (!(rho >= 0.0)) throw std::invalid_argument("intersection_radii: rho must be nonnegative");
  double total = 0.0;
  for (double b : betas) {
    if (!(b >= 0.0 && b < 1.0)) throw std::invalid_argument("intersection_radii: violation levels must lie in [0, 1)");
    total += b;
  }
  if (!(total < 1.0)) throw std::invalid_argument("intersection_radii: violation levels must sum below 1");

  IntersectionRadii out;
  out.radii.resize(T);
  for (std::size_t i = 0; i < T; ++i) out.radii[i] = eps_single(betas[i]) + static_cast<double>(T - i) * rho;
  out.min_radius = *std::min_element(out.radii.begin(), out.radii.end());
  out.single_radius_total = eps_single(total);
  out.non_collapse = out.min_radius >= out.single_radius_total;
  return out;
}

double single_sample_radius(double beta, const BoundParams& bp) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("single_sample_radius: beta must lie in (0, 1)");
  return std::pow(bp.c2 + std::sqrt(std::log(1.0 / beta) / bp.c1), 1.0 / bp.p);
}

std::string_view to_string(DriftFamily f) {
  switch (f) {
    case DriftFamily::StationaryBinomial: return "stationary-binomial";
    case DriftFamily::ShiftedBinomial: return "shifted-binomial";
    case DriftFamily::ShiftedUniformAtoms: return "shifted-uniform-atoms";
  }
  return "unknown";
}

DriftFamily parse_drift_family(std::string_view tag) {
  for (auto f : {DriftFamily::StationaryBinomial, DriftFamily::ShiftedBinomial, DriftFamily::ShiftedUniformAtoms}) {
    if (tag == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown drift family '" + std::string(tag) + "'");
}

void DriftSequenceSpec::validate() const {
  if (T == 0) throw std::invalid_argument("DriftSequenceSpec: T must be positive");
  if (!(rho >= 0.0)) throw std::invalid_argument("DriftSequenceSpec: rho must be nonnegative");
  if (family != DriftFamily::ShiftedUniformAtoms) {
    if (n < 1) throw std::invalid_argument("DriftSequenceSpec: n must be positive");
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("DriftSequenceSpec: theta outside [0, 1]");
  } else if (atoms < 1) {
    throw std::invalid_argument("DriftSequenceSpec: atoms must be positive");
  }
}

DiscreteDistribution1D DriftSequenceSpec::base_law() const {
  validate();
  if (family == DriftFamily::ShiftedUniformAtoms) {
    std::vector<double> pts(static_cast<std::size_t>(atoms));
    for (int j = 0; j < atoms; ++j) pts[j] = atoms == 1 ? 0.0 : static_cast<double>(j) / (atoms - 1);
    return DiscreteDistribution1D::uniform_on(pts);
  }
  std::vector<double> support(static_cast<std::size_t>(n) + 1);
  std::iota(support.begin(), support.end(), 0.0);
  std::vector<double> pmf = binomial_pmf(n, theta);
  double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (double& v : pmf) v /= total;
  return {std::move(support), std::move(pmf)};
}

DiscreteDistribution1D DriftSequenceSpec::law(std::size_t t) const {
  if (t < 1 || t > T + 1) throw std::invalid_argument("DriftSequenceSpec::law: t outside [1, T + 1]");
  if (family == DriftFamily::StationaryBinomial || rho == 0.0) return base_law();
  const double offset = (static_cast<double>(t) - static_cast<double>(T) - 1.0) * rho;
  return base_law().shifted(offset);
}

double DriftSequenceSpec::diameter() const {
  const double base = family == DriftFamily::ShiftedUniformAtoms ? 1.0 : static_cast<double>(n);
  const double drift = family == DriftFamily::StationaryBinomial ? 0.0 : static_cast<double>(T) * rho;
  return base + drift;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

// Everything a trial needs, prepared once per run.
struct TrialContext {
  const DriftSequenceSpec& spec;
  const WeightVector& w;
  double p;
  std::uint64_t seed;
  DiscreteDistribution1D target;
  std::vector<double> base_atoms;
  std::vector<double> base_cdf;  // for inverse-CDF sampling of the base law
  bool shared_support;           // all P_t share the base atoms

  TrialContext(const DriftSequenceSpec& s, const WeightVector& weights, double order, std::uint64_t sd)
      : spec(s), w(weights), p(order), seed(sd), target(s.target()) {
    spec.validate();
    if (weights.size() != spec.T) throw std::invalid_argument("monte_carlo: weight length differs from T");
    if (!std::isfinite(order) || order < 1.0) throw std::invalid_argument("monte_carlo: p must be finite and >= 1");
    const DiscreteDistribution1D base = spec.base_law();
    base_atoms.assign(base.atoms().begin(), base.atoms().end());
    base_cdf.assign(base.cumulative().begin(), base.cumulative().end());
    shared_support = spec.family == DriftFamily::StationaryBinomial || spec.rho == 0.0;
  }

  std::size_t draw_index(Xoshiro256& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(base_cdf.begin(), base_cdf.end(), u);
    if (it == base_cdf.end()) --it;
    return static_cast<std::size_t>(it - base_cdf.begin());
  }

  double distance(std::uint64_t trial) const {
    Xoshiro256 rng = Xoshiro256::for_stream(seed, trial);
    const std::size_t T = spec.T;
    if (shared_support) {
      std::vector<double> hist(base_atoms.size(), 0.0);
      for (std::size_t t = 0; t < T; ++t) hist[draw_index(rng)] += w[t];
      return wasserstein_p(DiscreteDistribution1D(base_atoms, std::move(hist)), target, p);
    }
    std::vector<double> locations(T);
    for (std::size_t t = 0; t < T; ++t) {
      const double offset = (static_cast<double>(t + 1) - static_cast<double>(T) - 1.0) * spec.rho;
      locations[t] = base_atoms[draw_index(rng)] + offset;
    }
    const auto values = w.values();
    return wasserstein_p(DiscreteDistribution1D(std::move(locations), std::vector<double>(values.begin(), values.end())),
                         target, p);
  }
};

MonteCarloTail summarize(const std::vector<double>& d, double p, double eps) {
  const std::size_t n = d.size();
  const double nd = static_cast<double>(n);
  std::vector<double> hit(n);
  std::vector<double> pw(n);
  for (std::size_t i = 0; i < n; ++i) {
    hit[i] = d[i] >= eps ? 1.0 : 0.0;
    pw[i] = std::pow(d[i], p);
  }
  const auto mean_se = [&](const std::vector<double>& v) {
    const double mean = pairwise_sum(v) / nd;
    if (n < 2) return std::pair{mean, 0.0};
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
    return std::pair{mean, std::sqrt(pairwise_sum(sq) / (nd - 1.0) / nd)};
  };
  const auto [freq, freq_se_unused] = mean_se(hit);
  (void)freq_se_unused;
  const auto [mean_d, se_d] = mean_se(d);
  const auto [mean_pw, se_pw] = mean_se(pw);
  MonteCarloTail out;
  out.frequency = freq;
  out.frequency_stderr = std::sqrt(freq * (1.0 - freq) / nd);
  out.mean_wp = mean_d;
  out.mean_wp_stderr = se_d;
  out.mean_wp_pow = mean_pw;
  out.mean_wp_pow_stderr = se_pw;
  out.trials = n;
  return out;
}

}  // namespace

std::vector<double> sample_weighted_distances(const DriftSequenceSpec& spec, const WeightVector& w, double p,
                                              std::size_t trials, std::uint64_t seed) {
  const TrialContext ctx(spec, w, p, seed);
  std::vector<double> d(trials);
  const auto n = static_cast<long long>(trials);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = ctx.distance(static_cast<std::uint64_t>(i));
  return d;
}

std::vector<double> sample_weighted_distances_serial(const DriftSequenceSpec& spec, const WeightVector& w, double p,
                                                     std::size_t trials, std::uint64_t seed) {
  const TrialContext ctx(spec, w, p, seed);
  std::vector<double> d(trials);
  for (std::size_t i = 0; i < trials; ++i) d[i] = ctx.distance(i);
  return d;
}

MonteCarloTail monte_carlo_tail(const DriftSequenceSpec& spec, const WeightVector& w, double p, double eps,
                                std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_tail: trials must be positive");
  return summarize(sample_weighted_distances(spec, w, p, trials, seed), p, eps);
}

MonteCarloTail monte_carlo_tail_serial(const DriftSequenceSpec& spec, const WeightVector& w, double p, double eps,
                                       std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_tail: trials must be positive");
  return summarize(sample_weighted_distances_serial(spec, w, p, trials, seed), p, eps);
}

QuantileEstimate empirical_upper_quantile(std::vector<double> samples, double beta, double z) {
  if (samples.empty()) throw std::invalid_argument("empirical_upper_quantile: no samples");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("empirical_upper_quantile: beta must lie in (0, 1)");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const double level = 1.0 - beta;
  const auto pick = [&](double rank) {
    const double idx = std::clamp(std::ceil(rank) - 1.0, 0.0, n - 1.0);
    return samples[static_cast<std::size_t>(idx)];
  };
  const double spread = z * std::sqrt(n * beta * level);
  return {pick(level * n), pick(level * n - spread), pick(level * n + spread)};
}

Calibration calibrate(DriftSequenceSpec spec, const BoundParams& bp, std::span<const std::size_t> sizes,
                      std::span<const double> eps_grid, std::size_t trials, std::uint64_t seed) {
  if (sizes.empty() || eps_grid.empty()) throw std::invalid_argument("calibrate: empty grid");
  std::vector<std::vector<double>> samples;
  double c0 = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    spec.T = sizes[i];
    const WeightVector w = WeightVector::uniform(sizes[i]);
    samples.push_back(sample_weighted_distances(spec, w, bp.p, trials, derive_seed(seed, i)));
    const MonteCarloTail mc = summarize(samples.back(), bp.p, 0.0);
    const double n_eff = static_cast<double>(sizes[i]);
    c0 = std::max(c0, (mc.mean_wp_pow + 3.0 * mc.mean_wp_pow_stderr) * std::pow(n_eff, bp.q));
  }
  double c1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double n_eff = static_cast<double>(sizes[i]);
    for (double eps : eps_grid) {
      const MonteCarloTail mc = summarize(samples[i], bp.p, eps);
      const double margin = std::pow(eps, bp.p) - c0 * std::pow(n_eff, -bp.q);
      if (margin <= 0.0 || mc.frequency == 0.0) continue;
      const double upper = std::min(1.0, mc.frequency + 3.0 * mc.frequency_stderr);
      if (upper >= 1.0) {
        c1 = 0.0;
        continue;
      }
      c1 = std::min(c1, -std::log(upper) / (n_eff * margin * margin));
    }
  }
  if (!std::isfinite(c1)) c1 = 2.0 * std::pow(spec.diameter(), -2.0 * bp.p);
  return {c0, c1, bp.q};
}

}  // namespace wdro
