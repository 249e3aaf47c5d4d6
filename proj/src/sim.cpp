#include "wdro/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

#include "wdro/concentration.hpp"
#include "wdro/dro.hpp"
#include "wdro/empirical.hpp"
#include "wdro/rng.hpp"
#include "wdro/weights.hpp"

namespace wdro {

void DemandModel::validate() const {
  if (n < 1) throw std::invalid_argument("DemandModel: n must be positive");
  if (!(theta1 >= 0.0 && theta1 <= 1.0)) throw std::invalid_argument("DemandModel: theta1 outside [0, 1]");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("DemandModel: delta must be finite and >= 0");
  if (T < 1) throw std::invalid_argument("DemandModel: T must be positive");
}

namespace {

double step_theta(double theta, double delta, Xoshiro256& rng) {
  return std::clamp(theta + delta * (2.0 * rng.uniform() - 1.0), 0.0, 1.0);
}

}  // namespace

std::vector<double> simulate_theta_path(const DemandModel& model, std::size_t horizon, std::uint64_t seed) {
  model.validate();
  if (horizon < 1) throw std::invalid_argument("simulate_theta_path: horizon must be positive");
  Xoshiro256 rng = Xoshiro256::for_stream(seed, 0);
  std::vector<double> path(horizon);
  path[0] = model.theta1;
  for (std::size_t t = 1; t < horizon; ++t) path[t] = step_theta(path[t - 1], model.delta, rng);
  return path;
}

double expected_newsvendor_cost(double x, std::span<const double> pmf, double c_u, double c_o) {
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double d = static_cast<double>(k);
    acc += pmf[k] * (d > x ? c_u * (d - x) : c_o * (x - d));
  }
  return acc;
}

double expected_newsvendor_cost_binomial(double x, int n, double theta, double c_u, double c_o) {
  if (n < 0) throw std::invalid_argument("expected_newsvendor_cost_binomial: n must be nonnegative");
  if (!(x >= 0.0 && x <= n)) throw std::invalid_argument("expected_newsvendor_cost_binomial: x outside [0, n]");
  if (!(c_u > 0.0 && c_o > 0.0)) throw std::invalid_argument("expected_newsvendor_cost_binomial: costs must be positive");
  const std::vector<double> pmf = binomial_pmf(n, theta);
  return expected_newsvendor_cost(x, pmf, c_u, c_o);
}

std::vector<double> lin_range(double a, double b, std::size_t n) {
  if (n < 1 || !(a <= b)) throw std::invalid_argument("lin_range: need n >= 1 and a <= b");
  if (n == 1) {
    if (a != b) throw std::invalid_argument("lin_range: a single point needs a == b");
    return {a};
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = b;
  return out;
}

std::vector<double> log_range(double a, double b, std::size_t n) {
  if (!(a > 0.0)) throw std::invalid_argument("log_range: a must be positive");
  std::vector<double> exps = lin_range(std::log(a), std::log(b), n);
  for (double& v : exps) v = std::exp(v);
  exps.front() = a;
  exps.back() = b;
  return exps;
}

std::string_view to_string(SweepMethod m) {
  switch (m) {
    case SweepMethod::Saa: return "saa";
    case SweepMethod::Smoothing: return "smoothing";
    case SweepMethod::WeightedDro: return "weighted";
    case SweepMethod::IntersectionDro: return "intersection";
  }
  return "unknown";
}

namespace {

std::vector<double> with_zero(std::vector<double> v) {
  v.insert(v.begin(), 0.0);
  return v;
}

}  // namespace

std::vector<double> SweepConfig::default_deltas() { return with_zero(log_range(1e-4, 1e-1, 7)); }

std::vector<double> SweepConfig::default_epsilons() {
  std::vector<double> eps{0.0};
  for (const auto& part : {lin_range(0.1, 1.0, 10), lin_range(1.0, 10.0, 10), lin_range(10.0, 100.0, 10)}) {
    eps.insert(eps.end(), part.begin(), part.end());
  }
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  return eps;
}

SweepConfig SweepConfig::desk() {
  SweepConfig cfg;
  cfg.deltas = default_deltas();
  cfg.epsilons = default_epsilons();
  cfg.rho_over_eps = with_zero(log_range(1e-4, 1.0, 30));
  cfg.alphas = with_zero(log_range(1e-4, 1.0, 30));
  return cfg;
}

SweepConfig SweepConfig::paper() {
  SweepConfig cfg = desk();
  cfg.simulations = 100;
  cfg.jumps = 1000;
  return cfg;
}

void SweepConfig::validate() const {
  if (methods.empty()) throw std::invalid_argument("SweepConfig: no methods");
  if (deltas.empty()) throw std::invalid_argument("SweepConfig: empty delta grid");
  if (simulations < 1 || jumps < 1) throw std::invalid_argument("SweepConfig: counts must be positive");
  if (!(c_u > 0.0 && c_o > 0.0)) throw std::invalid_argument("SweepConfig: costs must be positive");
  if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument("SweepConfig: p must be finite and >= 1");
  if (intersection_grid < 2) throw std::invalid_argument("SweepConfig: intersection grid too small");
  const bool dro = std::any_of(methods.begin(), methods.end(), [](SweepMethod m) {
    return m == SweepMethod::WeightedDro || m == SweepMethod::IntersectionDro;
  });
  if (dro && (epsilons.empty() || rho_over_eps.empty())) throw std::invalid_argument("SweepConfig: empty DRO grids");
  if (std::find(methods.begin(), methods.end(), SweepMethod::Smoothing) != methods.end() && alphas.empty()) {
    throw std::invalid_argument("SweepConfig: empty smoothing grid");
  }
  for (double d : deltas) {
    if (!(d >= 0.0)) throw std::invalid_argument("SweepConfig: delta must be >= 0");
  }
  for (double e : epsilons) {
    if (!(e >= 0.0)) throw std::invalid_argument("SweepConfig: eps must be >= 0");
  }
  for (double r : rho_over_eps) {
    if (!(r >= 0.0)) throw std::invalid_argument("SweepConfig: rho/eps must be >= 0");
  }
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("SweepConfig: alpha outside [0, 1]");
  }
}

const SweepOptimum& SweepResult::optimum(SweepMethod m, double delta) const {
  for (const SweepOptimum& o : optima) {
    if (o.method == m && o.delta == delta) return o;
  }
  throw std::out_of_range("SweepResult: no optimum for method " + std::string(to_string(m)));
}

namespace {

struct CellSpec {
  SweepMethod method;
  double epsilon;
  double param;
  std::size_t weight_index;  // into the shared weight table, where relevant
};

struct Plan {
  DemandModel model;
  SweepConfig cfg;
  std::vector<CellSpec> cells;
  std::vector<WeightVector> weights;
};

Plan make_plan(const DemandModel& model, const SweepConfig& cfg) {
  model.validate();
  cfg.validate();
  Plan plan{model, cfg, {}, {}};
  const std::size_t T = model.T;
  for (SweepMethod m : cfg.methods) {
    switch (m) {
      case SweepMethod::Saa:
        plan.weights.push_back(WeightVector::uniform(T));
        plan.cells.push_back({m, 0.0, 0.0, plan.weights.size() - 1});
        break;
      case SweepMethod::Smoothing:
        for (double a : cfg.alphas) {
          plan.weights.push_back(smoothing_weights(T, a));
          plan.cells.push_back({m, 0.0, a, plan.weights.size() - 1});
        }
        break;
      case SweepMethod::WeightedDro: {
        const std::size_t first = plan.weights.size();
        for (double r : cfg.rho_over_eps) {
          plan.weights.push_back(r == 0.0 ? WeightVector::uniform(T)
                                          : optimal_weights(TradeoffInstance(T, cfg.p, 1.0 / r)).w);
        }
        for (double e : cfg.epsilons) {
          for (std::size_t k = 0; k < cfg.rho_over_eps.size(); ++k) {
            plan.cells.push_back({m, e, cfg.rho_over_eps[k], first + k});
          }
        }
        break;
      }
      case SweepMethod::IntersectionDro:
        for (double e : cfg.epsilons) {
          for (double r : cfg.rho_over_eps) plan.cells.push_back({m, e, r, 0});
        }
        break;
    }
  }
  return plan;
}

// Mean of Binomial(n, theta') pmfs over `jumps` next-period draws.
std::vector<double> next_period_pmf(int n, double theta_T, double delta, std::size_t jumps, Xoshiro256& rng) {
  std::vector<double> mix(static_cast<std::size_t>(n) + 1, 0.0);
  double last_theta = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> pmf;
  for (std::size_t j = 0; j < jumps; ++j) {
    const double theta = step_theta(theta_T, delta, rng);
    if (theta != last_theta) {
      pmf = binomial_pmf(n, theta);
      last_theta = theta;
    }
    for (std::size_t k = 0; k < mix.size(); ++k) mix[k] += pmf[k];
  }
  for (double& v : mix) v /= static_cast<double>(jumps);
  return mix;
}

// Ex-post costs of every cell for one simulation at one delta; NaN marks a failure.
std::vector<double> run_unit(const Plan& plan, double delta, std::size_t sim) {
  const DemandModel& base = plan.model;
  const SweepConfig& cfg = plan.cfg;
  DemandModel model = base;
  model.delta = delta;
  const std::size_t T = model.T;
  const std::uint64_t sim_seed = derive_seed(cfg.seed, sim);

  const std::vector<double> theta = simulate_theta_path(model, T, sim_seed);
  Xoshiro256 demand_rng = Xoshiro256::for_stream(sim_seed, 1);
  std::vector<double> demands(T);
  for (std::size_t t = 0; t < T; ++t) demands[t] = BinomialSampler(model.n, theta[t])(demand_rng);
  Xoshiro256 jump_rng = Xoshiro256::for_stream(sim_seed, 2);
  const std::vector<double> next_pmf = next_period_pmf(model.n, theta.back(), delta, cfg.jumps, jump_rng);

  const double lo = 0.0;
  const double hi = static_cast<double>(model.n);
  const double fractile = cfg.c_u / (cfg.c_u + cfg.c_o);
  std::vector<double> costs(plan.cells.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < plan.cells.size(); ++c) {
    const CellSpec& cell = plan.cells[c];
    double x = 0.0;
    try {
      switch (cell.method) {
        case SweepMethod::Saa:
        case SweepMethod::Smoothing:
          x = make_weighted_empirical(demands, plan.weights[cell.weight_index]).quantile(fractile);
          break;
        case SweepMethod::WeightedDro: {
          DiscreteDistribution1D center = make_weighted_empirical(demands, plan.weights[cell.weight_index]);
          if (cell.epsilon == 0.0) {
            x = center.quantile(fractile);
          } else {
            const WeightedBall ball{std::move(center), cell.epsilon, cfg.p, lo, hi};
            x = newsvendor_order(ball, cfg.c_u, cfg.c_o, DroMethod::Dual).x;
          }
          break;
        }
        case SweepMethod::IntersectionDro: {
          IntersectionSet set{demands, std::vector<double>(T), cfg.p, lo, hi};
          const double rho = cell.param * cell.epsilon;
          for (std::size_t t = 0; t < T; ++t) set.radii[t] = cell.epsilon + static_cast<double>(T - t) * rho;
          x = newsvendor_order(set, cfg.c_u, cfg.c_o, DroMethod::Grid, cfg.intersection_grid).x;
          break;
        }
      }
    } catch (const std::runtime_error&) {
      continue;
    }
    costs[c] = expected_newsvendor_cost(x, next_pmf, cfg.c_u, cfg.c_o);
  }
  return costs;
}

SweepResult aggregate(const Plan& plan, const std::vector<std::vector<double>>& unit_costs) {
  const SweepConfig& cfg = plan.cfg;
  SweepResult out;
  for (std::size_t d = 0; d < cfg.deltas.size(); ++d) {
    for (std::size_t c = 0; c < plan.cells.size(); ++c) {
      std::vector<double> ok;
      for (std::size_t s = 0; s < cfg.simulations; ++s) {
        const double v = unit_costs[d * cfg.simulations + s][c];
        if (!std::isnan(v)) ok.push_back(v);
      }
      const CellSpec& spec = plan.cells[c];
      SweepCell cell{spec.method, cfg.deltas[d], spec.epsilon, spec.param, std::numeric_limits<double>::quiet_NaN(), 0.0,
                     cfg.simulations - ok.size()};
      if (!ok.empty()) {
        const double k = static_cast<double>(ok.size());
        cell.mean_cost = pairwise_sum(ok) / k;
        if (ok.size() > 1) {
          std::vector<double> sq(ok.size());
          for (std::size_t i = 0; i < ok.size(); ++i) sq[i] = (ok[i] - cell.mean_cost) * (ok[i] - cell.mean_cost);
          cell.stderr_cost = std::sqrt(pairwise_sum(sq) / (k - 1.0) / k);
        }
      }
      out.cells.push_back(cell);
    }
    for (SweepMethod m : cfg.methods) {
      const SweepCell* best = nullptr;
      for (std::size_t c = out.cells.size() - plan.cells.size(); c < out.cells.size(); ++c) {
        const SweepCell& cell = out.cells[c];
        if (cell.method != m || cell.failures != 0) continue;
        if (!best || cell.mean_cost < best->mean_cost) best = &cell;
      }
      if (best) {
        out.optima.push_back({m, best->delta, best->epsilon, best->param, best->mean_cost, best->stderr_cost});
      }
    }
  }
  return out;
}

}  // namespace

SweepResult expost_sweep(const DemandModel& model, const SweepConfig& cfg) {
  const Plan plan = make_plan(model, cfg);
  const std::size_t units = cfg.deltas.size() * cfg.simulations;
  std::vector<std::vector<double>> unit_costs(units);
  std::vector<std::exception_ptr> errors(units);
  const auto n = static_cast<long long>(units);
#pragma omp parallel for schedule(dynamic)
  for (long long u = 0; u < n; ++u) {
    const auto i = static_cast<std::size_t>(u);
    try {
      unit_costs[i] = run_unit(plan, cfg.deltas[i / cfg.simulations], i % cfg.simulations);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return aggregate(plan, unit_costs);
}

SweepResult expost_sweep_serial(const DemandModel& model, const SweepConfig& cfg) {
  const Plan plan = make_plan(model, cfg);
  const std::size_t units = cfg.deltas.size() * cfg.simulations;
  std::vector<std::vector<double>> unit_costs(units);
  for (std::size_t i = 0; i < units; ++i) {
    unit_costs[i] = run_unit(plan, cfg.deltas[i / cfg.simulations], i % cfg.simulations);
  }
  return aggregate(plan, unit_costs);
}

}  // namespace wdro
