#include "wdro/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wdro/concentration.hpp"
#include "wdro/dro.hpp"
#include "wdro/empirical.hpp"
#include "wdro/io.hpp"
#include "wdro/sim.hpp"
#include "wdro/weights.hpp"

namespace wdro::cli {

namespace {

using io::json;

// Raised for malformed or inconsistent arguments detected after parsing.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct File {
  std::string name;
  std::string content;
};

// What a subcommand produced. `record` is the JSON rendering; `table`, when
// present, is the CSV rendering; `extra` files are written in both formats.
struct Output {
  std::string stem;
  json record;
  std::optional<Table> table;
  std::vector<File> extra;
};

enum class Format { Csv, Json };

std::string num(double v) { return io::format_double(v); }

std::string render_csv(const Table& t) {
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

// key,value rows for the scalar fields of a flat record.
Table flatten(const json& record) {
  Table t{{"key", "value"}, {}};
  for (const auto& [key, value] : record.items()) {
    if (value.is_number()) {
      t.rows.push_back({key, num(value.get<double>())});
    } else if (value.is_string()) {
      t.rows.push_back({key, value.get<std::string>()});
    } else if (value.is_boolean()) {
      t.rows.push_back({key, value.get<bool>() ? "true" : "false"});
    } else if (value.is_array() && std::all_of(value.begin(), value.end(), [](const json& v) { return v.is_number(); })) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        t.rows.push_back({key + "[" + std::to_string(i) + "]", num(value[i].get<double>())});
      }
    }
  }
  return t;
}

std::vector<File> render(const Output& o, Format f) {
  std::vector<File> files;
  if (f == Format::Json) {
    files.push_back({o.stem + ".json", o.record.dump(2) + "\n"});
  } else {
    files.push_back({o.stem + ".csv", render_csv(o.table ? *o.table : flatten(o.record))});
  }
  files.insert(files.end(), o.extra.begin(), o.extra.end());
  return files;
}

Table weights_table(const WeightVector& w) {
  Table t{{"t", "w_t"}, {}};
  for (std::size_t i = 0; i < w.size(); ++i) t.rows.push_back({std::to_string(i + 1), num(w[i])});
  return t;
}

// Shared numeric flags.
struct Options {
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  std::string preset;

  std::size_t T = 100;
  double p = 1.0;
  std::optional<double> eps_over_rho;
  std::optional<double> eps;
  std::optional<double> rho;
  std::optional<std::size_t> window;
  std::optional<double> alpha;

  double n_eff = 100.0;
  int m = 1;
  std::optional<double> delta_shift;
  std::optional<double> diam;
  std::optional<double> c0;
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<double> q;
  std::string weighting = "optimal";

  double beta = 0.05;
  double bias = 1.0;
  double rate = 1.0;
  double radius_q = 0.499;

  std::string family = "stationary-binomial";
  std::size_t trials = 2000;
  int binom_n = 100;
  double theta = 1.0 / 3.0;
  int atoms = 10;

  std::string P;
  std::string Q;
  std::string order = "1";

  std::string instance;
  std::string method = "dual";
  std::size_t grid = 2001;
  std::optional<double> c_u;
  std::optional<double> c_o;

  std::vector<double> deltas;
  std::optional<std::size_t> simulations;
  std::optional<std::size_t> jumps;
  std::vector<std::string> methods;
  int demand_n = 1000;
  std::size_t history = 70;
  double theta1 = 1.0 / 3.0;

  std::vector<double> obs{1.0, -1.0, 2.0, 3.0};
  double geo_eps = 3.0;
  double geo_rho = 1.0 / 3.0;
  double geo_p = 2.0;
  double scale = 1.5;
  double mean_min = -2.0;
  double mean_max = 4.0;
  double std_min = 0.0;
  double std_max = 3.0;
  std::size_t resolution = 201;
};

double ratio_from(const Options& o) {
  if (o.eps_over_rho) return *o.eps_over_rho;
  if (o.eps && o.rho) {
    if (!(*o.rho > 0.0)) throw UsageError("--rho must be positive");
    return *o.eps / *o.rho;
  }
  throw UsageError("give --eps-over-rho, or both --eps and --rho");
}

BoundParams bound_params(const Options& o) {
  BoundParams bp = BoundParams::make(o.m, o.p, o.delta_shift, o.diam);
  if (o.c0) bp.c0 = *o.c0;
  if (o.c1) bp.c1 = *o.c1;
  if (o.c2) bp.c2 = *o.c2;
  if (o.q) bp.q = *o.q;
  bp.validate();
  return bp;
}

json bound_json(const BoundParams& bp) {
  return {{"m", bp.m}, {"p", bp.p}, {"q", bp.q}, {"c0", bp.c0}, {"c1", bp.c1}, {"c2", bp.c2}, {"diam", bp.diam}};
}

WeightVector pick_weights(const Options& o, std::size_t T, double ratio) {
  if (o.weighting == "uniform") return WeightVector::uniform(T);
  if (o.weighting == "recent") return WeightVector::most_recent(T);
  if (o.weighting == "optimal") return optimal_weights(TradeoffInstance(T, o.p, ratio)).w;
  throw UsageError("unknown weighting '" + o.weighting + "'");
}

void require_no_preset(const Options& o, const char* cmd) {
  if (!o.preset.empty()) throw UsageError(std::string("--preset ") + o.preset + " does not apply to " + cmd);
}

Output cmd_weights_optimal(const Options& o) {
  if (o.preset == "fig2") {
    Table t{{"t", "w_t", "p"}, {}};
    json series = json::array();
    for (int p = 1; p <= 5; ++p) {
      const double ratio = 90.0 * p;
      const OptimalWeights ow = optimal_weights(TradeoffInstance(100, p, ratio));
      for (std::size_t i = 0; i < ow.w.size(); ++i) t.rows.push_back({std::to_string(i + 1), num(ow.w[i]), std::to_string(p)});
      json rec = io::to_json(ow.w, p);
      rec["eps_over_rho"] = ratio;
      rec["objective"] = ow.objective;
      rec["support"] = ow.support;
      series.push_back(rec);
    }
    return {"weights_fig2", {{"series", series}}, t, {}};
  }
  require_no_preset(o, "weights optimal");
  const double ratio = ratio_from(o);
  const OptimalWeights ow = optimal_weights(TradeoffInstance(o.T, o.p, ratio));
  json rec = io::to_json(ow.w, o.p);
  rec["eps_over_rho"] = ratio;
  rec["objective"] = ow.objective;
  rec["support"] = ow.support;
  rec["c1"] = ow.c1;
  rec["c2"] = ow.c2;
  rec["degenerate"] = ow.degenerate;
  return {"weights_optimal", rec, weights_table(ow.w), {}};
}

Output cmd_weights_p1(const Options& o) {
  require_no_preset(o, "weights p1");
  const double ratio = ratio_from(o);
  const WeightVector w = optimal_weights_p1(TradeoffInstance(o.T, 1.0, ratio));
  json rec = io::to_json(w, 1.0);
  rec["eps_over_rho"] = ratio;
  return {"weights_p1", rec, weights_table(w), {}};
}

Output cmd_weights_window(const Options& o) {
  require_no_preset(o, "weights window");
  std::size_t s = 0;
  json rec;
  if (o.window) {
    s = *o.window;
  } else {
    const double ratio = ratio_from(o);
    s = optimal_window_size(TradeoffInstance(o.T, 1.0, ratio));
    rec["eps_over_rho"] = ratio;
    rec["objective"] = window_objective(s, ratio);
  }
  const WeightVector w = window_weights(o.T, s);
  json base = io::to_json(w, o.p);
  base.update(rec);
  base["s"] = s;
  return {"weights_window", base, weights_table(w), {}};
}

Output cmd_weights_smooth(const Options& o) {
  require_no_preset(o, "weights smooth");
  double alpha = 0.0;
  json rec;
  if (o.alpha) {
    alpha = *o.alpha;
  } else {
    const double ratio = ratio_from(o);
    alpha = optimal_smoothing_rate(ratio);
    rec["eps_over_rho"] = ratio;
    rec["objective"] = smoothing_objective(alpha, ratio);
  }
  const WeightVector w = smoothing_weights(o.T, alpha);
  json base = io::to_json(w, o.p);
  base.update(rec);
  base["alpha"] = alpha;
  return {"weights_smooth", base, weights_table(w), {}};
}

Output cmd_bound_stationary(const Options& o) {
  require_no_preset(o, "bound stationary");
  if (!o.eps) throw UsageError("--eps is required");
  const BoundParams bp = bound_params(o);
  json rec{{"N_eff", o.n_eff},
           {"eps", *o.eps},
           {"constants", bound_json(bp)},
           {"value", stationary_tail_bound(o.n_eff, *o.eps, bp)},
           {"clean_value", stationary_tail_bound_clean(o.n_eff, *o.eps, bp)},
           {"clean_applies", clean_tail_applies(o.n_eff, *o.eps, bp)}};
  return {"bound_stationary", rec, std::nullopt, {}};
}

Output cmd_bound_drift(const Options& o) {
  require_no_preset(o, "bound drift");
  if (!o.eps || !o.rho) throw UsageError("--eps and --rho are required");
  const BoundParams bp = bound_params(o);
  const double ratio = *o.rho > 0.0 ? *o.eps / *o.rho : std::numeric_limits<double>::infinity();
  const WeightVector w = std::isinf(ratio) && o.weighting == "optimal" ? WeightVector::uniform(o.T)
                                                                        : pick_weights(o, o.T, ratio);
  json rec{{"T", o.T},
           {"eps", *o.eps},
           {"rho", *o.rho},
           {"weighting", o.weighting},
           {"N_eff", effective_sample_size(w)},
           {"D_p", weighted_drift(w, bp.p)},
           {"constants", bound_json(bp)},
           {"value", drift_tail_bound(w, *o.eps, *o.rho, bp)}};
  return {"bound_drift", rec, std::nullopt, {}};
}

Output cmd_radius(const Options& o) {
  require_no_preset(o, "radius");
  if (!o.rho) throw UsageError("--rho is required");
  const RadiusParams rp{o.bias, o.rate, o.radius_q};
  const ConfidenceRadius r = confidence_radius(o.beta, *o.rho, o.T, rp);
  json rec{{"beta", o.beta},
           {"rho", *o.rho},
           {"T", o.T},
           {"bias", rp.bias},
           {"rate", rp.rate},
           {"q", rp.q},
           {"radius", r.radius},
           {"regime", std::string(to_string(r.regime))},
           {"support", r.support},
           {"rho_star", r.rho_star}};
  return {"radius", rec, std::nullopt, {}};
}

Output cmd_montecarlo(const Options& o) {
  require_no_preset(o, "montecarlo");
  if (!o.eps) throw UsageError("--eps is required");
  DriftSequenceSpec spec;
  spec.family = parse_drift_family(o.family);
  spec.rho = o.rho.value_or(0.0);
  spec.T = o.T;
  spec.n = o.binom_n;
  spec.theta = o.theta;
  spec.atoms = o.atoms;
  spec.validate();
  Options with_diam = o;
  if (!with_diam.diam) with_diam.diam = spec.diameter();
  const BoundParams bp = bound_params(with_diam);
  const double ratio = spec.rho > 0.0 ? *o.eps / spec.rho : std::numeric_limits<double>::infinity();
  const WeightVector w = std::isinf(ratio) && o.weighting == "optimal" ? WeightVector::uniform(o.T)
                                                                        : pick_weights(o, o.T, ratio);
  const MonteCarloTail mc = monte_carlo_tail(spec, w, o.p, *o.eps, o.trials, o.seed);
  json rec{{"family", std::string(to_string(spec.family))},
           {"rho", spec.rho},
           {"T", spec.T},
           {"p", o.p},
           {"eps", *o.eps},
           {"trials", o.trials},
           {"seed", o.seed},
           {"weighting", o.weighting},
           {"N_eff", effective_sample_size(w)},
           {"D_p", weighted_drift(w, o.p)},
           {"value", mc.frequency},
           {"stderr", mc.frequency_stderr},
           {"mean_W", mc.mean_wp},
           {"mean_W_stderr", mc.mean_wp_stderr},
           {"mean_W_pow", mc.mean_wp_pow},
           {"mean_W_pow_stderr", mc.mean_wp_pow_stderr},
           {"constants", bound_json(bp)},
           {"bound", drift_tail_bound(w, *o.eps, spec.rho, bp)}};
  return {"montecarlo", rec, std::nullopt, {}};
}

json load_json_arg(const std::string& arg, const char* flag) {
  if (arg.empty()) throw UsageError(std::string(flag) + " is required");
  if (arg.front() == '{') return io::parse(arg);
  return io::read_file(arg);
}

Output cmd_wass(const Options& o) {
  require_no_preset(o, "wass");
  const DiscreteDistribution1D P = io::distribution_from_json(load_json_arg(o.P, "--P"));
  const DiscreteDistribution1D Q = io::distribution_from_json(load_json_arg(o.Q, "--Q"));
  json rec{{"P", io::to_json(P)}, {"Q", io::to_json(Q)}};
  if (o.order == "inf") {
    rec["p"] = "inf";
    rec["value"] = wasserstein_inf(P, Q);
  } else {
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(o.order, &used);
      if (used != o.order.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError("--p must be a number >= 1 or 'inf'");
    }
    rec["p"] = p;
    rec["value"] = wasserstein_p(P, Q, p);
  }
  return {"wass", rec, std::nullopt, {}};
}

Output cmd_dro_worst_case(const Options& o) {
  require_no_preset(o, "dro worst-case");
  const json inst = load_json_arg(o.instance, "--instance");
  if (!inst.contains("loss") || !inst.contains("spec")) throw UsageError("instance needs 'loss' and 'spec'");
  const PiecewiseAffineLoss loss = io::loss_from_json(inst.at("loss"));
  const AmbiguitySpec spec = io::spec_from_json(inst.at("spec"));
  const std::size_t grid = inst.value("grid_size", o.grid);
  json rec{{"loss", io::to_json(loss)}, {"spec", io::to_json(spec)}, {"grid_size", grid}};
  if (const auto* ball = std::get_if<WeightedBall>(&spec)) {
    const DroMethod m = parse_dro_method(o.method);
    rec["method"] = std::string(to_string(m));
    rec["value"] = m == DroMethod::Dual ? worst_case_dual(loss, *ball) : worst_case_grid_lp(loss, *ball, grid);
  } else {
    const IntersectionValue v = worst_case_intersection(loss, std::get<IntersectionSet>(spec), grid);
    rec["method"] = "grid";
    rec["value"] = v.value;
    rec["doublings"] = v.doublings;
  }
  return {"dro_worst_case", rec, std::nullopt, {}};
}

Output cmd_dro_order(const Options& o) {
  require_no_preset(o, "dro order");
  const json inst = load_json_arg(o.instance, "--instance");
  if (!inst.contains("spec")) throw UsageError("instance needs 'spec'");
  const AmbiguitySpec spec = io::spec_from_json(inst.at("spec"));
  const double c_u = o.c_u ? *o.c_u : inst.value("c_u", 4.0);
  const double c_o = o.c_o ? *o.c_o : inst.value("c_o", 1.0);
  const std::size_t grid = inst.value("grid_size", o.grid);
  const DroMethod m = parse_dro_method(o.method);
  const OrderDecision d = newsvendor_order(spec, c_u, c_o, m, grid);
  json rec{{"spec", io::to_json(spec)},
           {"c_u", c_u},
           {"c_o", c_o},
           {"method", std::holds_alternative<IntersectionSet>(spec) ? "grid" : std::string(to_string(m))},
           {"grid_size", grid},
           {"x", d.x},
           {"value", d.value},
           {"doublings", d.doublings}};
  return {"dro_order", rec, std::nullopt, {}};
}

SweepMethod parse_sweep_method(const std::string& s) {
  for (SweepMethod m : {SweepMethod::Saa, SweepMethod::Smoothing, SweepMethod::WeightedDro, SweepMethod::IntersectionDro}) {
    if (s == to_string(m)) return m;
  }
  throw UsageError("unknown method '" + s + "'");
}

Output cmd_simulate(const Options& o) {
  SweepConfig cfg;
  if (o.preset.empty() || o.preset == "desk" || o.preset == "fig3") {
    cfg = SweepConfig::desk();
  } else if (o.preset == "paper") {
    cfg = SweepConfig::paper();
  } else {
    throw UsageError("--preset " + o.preset + " does not apply to simulate");
  }
  cfg.seed = o.seed;
  if (!o.deltas.empty()) cfg.deltas = o.deltas;
  if (o.simulations) cfg.simulations = *o.simulations;
  if (o.jumps) cfg.jumps = *o.jumps;
  if (!o.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : o.methods) cfg.methods.push_back(parse_sweep_method(m));
  }
  DemandModel model;
  model.n = o.demand_n;
  model.T = o.history;
  model.theta1 = o.theta1;
  const SweepResult r = expost_sweep(model, cfg);

  Table t{{"method", "delta", "epsilon", "rho_over_eps_or_alpha", "mean_cost", "stderr", "failures"}, {}};
  json cells = json::array();
  for (const SweepCell& c : r.cells) {
    t.rows.push_back({std::string(to_string(c.method)), num(c.delta), num(c.epsilon), num(c.param), num(c.mean_cost),
                      num(c.stderr_cost), std::to_string(c.failures)});
    cells.push_back({{"method", std::string(to_string(c.method))},
                     {"delta", c.delta},
                     {"epsilon", c.epsilon},
                     {"param", c.param},
                     {"mean_cost", std::isnan(c.mean_cost) ? json(nullptr) : json(c.mean_cost)},
                     {"stderr", c.stderr_cost},
                     {"failures", c.failures}});
  }
  json optima = json::array();
  for (const SweepOptimum& opt : r.optima) {
    optima.push_back({{"method", std::string(to_string(opt.method))},
                      {"delta", opt.delta},
                      {"epsilon", opt.epsilon},
                      {"param", opt.param},
                      {"mean_cost", opt.mean_cost},
                      {"stderr", opt.stderr_cost}});
  }
  json settings{{"seed", cfg.seed},
                {"simulations", cfg.simulations},
                {"jumps", cfg.jumps},
                {"n", model.n},
                {"T", model.T},
                {"theta1", model.theta1},
                {"c_u", cfg.c_u},
                {"c_o", cfg.c_o},
                {"p", cfg.p}};
  json summary{{"settings", settings}, {"optima", optima}};
  json record{{"settings", settings}, {"cells", cells}, {"optima", optima}};
  return {"simulate", record, t, {{"simulate_summary.json", summary.dump(2) + "\n"}}};
}

Output cmd_geometry(const Options& o) {
  if (!o.preset.empty() && o.preset != "fig1") throw UsageError("--preset " + o.preset + " does not apply to geometry");
  if (o.obs.empty()) throw UsageError("--obs needs at least one observation");
  if (o.resolution < 2) throw UsageError("--resolution must be at least 2");
  if (!(o.mean_min < o.mean_max) || !(o.std_min < o.std_max) || o.std_min < 0.0) {
    throw UsageError("grid bounds must satisfy min < max and std >= 0");
  }
  if (!(o.geo_rho > 0.0)) throw UsageError("--rho must be positive");
  const std::size_t T = o.obs.size();
  const WeightVector w = optimal_weights(TradeoffInstance(T, o.geo_p, o.geo_eps / o.geo_rho)).w;
  const DiscreteDistribution1D center = make_weighted_empirical(o.obs, w);
  std::vector<double> radii(T);
  for (std::size_t i = 0; i < T; ++i) radii[i] = o.scale * (o.geo_eps + static_cast<double>(T - i) * o.geo_rho);

  Table t{{"mean", "std", "region"}, {}};
  std::size_t counts[4] = {0, 0, 0, 0};
  const char* names[4] = {"neither", "weighted-only", "intersection-only", "both"};
  const double tol = 1e-12;
  for (std::size_t i = 0; i < o.resolution; ++i) {
    const double mean = o.mean_min + (o.mean_max - o.mean_min) * static_cast<double>(i) / (o.resolution - 1.0);
    for (std::size_t k = 0; k < o.resolution; ++k) {
      const double sd = o.std_min + (o.std_max - o.std_min) * static_cast<double>(k) / (o.resolution - 1.0);
      bool in_ball = false;
      bool in_all = true;
      if (sd == 0.0) {
        in_ball = wasserstein_p_point(center, mean, o.geo_p) <= o.geo_eps + tol;
        for (std::size_t s = 0; s < T && in_all; ++s) in_all = std::abs(mean - o.obs[s]) <= radii[s] + tol;
      } else {
        const UniformLaw U = UniformLaw::from_moments(mean, sd);
        in_ball = wasserstein_p_uniform(center, U, o.geo_p) <= o.geo_eps + tol;
        for (std::size_t s = 0; s < T && in_all; ++s) in_all = wasserstein_p_point(U, o.obs[s], o.geo_p) <= radii[s] + tol;
      }
      const int region = (in_ball ? 1 : 0) + (in_all ? 2 : 0);
      ++counts[region];
      t.rows.push_back({num(mean), num(sd), names[region]});
    }
  }
  json count_json;
  for (int r = 0; r < 4; ++r) count_json[names[r]] = counts[r];
  json rec{{"obs", o.obs},
           {"p", o.geo_p},
           {"eps", o.geo_eps},
           {"rho", o.geo_rho},
           {"scale", o.scale},
           {"w", std::vector<double>(w.values().begin(), w.values().end())},
           {"weighted_mean", center.mean()},
           {"radii", radii},
           {"mean_range", {o.mean_min, o.mean_max}},
           {"std_range", {o.std_min, o.std_max}},
           {"resolution", o.resolution},
           {"counts", count_json}};
  json full = rec;
  json cells = json::array();
  for (const auto& row : t.rows) cells.push_back({{"mean", std::stod(row[0])}, {"std", std::stod(row[1])}, {"region", row[2]}});
  full["cells"] = cells;
  return {"geometry", full, t, {}};
}

void write_files(const std::vector<File>& files, const std::string& dir, std::ostream& out) {
  if (dir.empty()) {
    for (const File& f : files) out << f.content;
    return;
  }
  std::filesystem::create_directories(dir);
  for (const File& f : files) {
    const std::filesystem::path path = std::filesystem::path(dir) / f.name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot write '" + path.string() + "'");
    os << f.content;
    if (!os) throw UsageError("failed writing '" + path.string() + "'");
    out << path.string() << '\n';
  }
}

void add_ratio_flags(CLI::App* c, Options& o) {
  c->add_option("--eps-over-rho", o.eps_over_rho, "Ratio eps/rho (dimensionless)");
  c->add_option("--eps", o.eps, "Ball radius eps (distance units)");
  c->add_option("--rho", o.rho, "Drift bound rho (distance units per period)");
}

void add_bound_flags(CLI::App* c, Options& o) {
  c->add_option("--p", o.p, "Wasserstein order p (>= 1)");
  c->add_option("--m", o.m, "Ambient dimension m (enters the rate exponent)");
  c->add_option("--delta", o.delta_shift, "Shift subtracted from min(p/m, 1/2) to form q (dimensionless)");
  c->add_option("--diam", o.diam, "Support diameter (distance units); sets c1 = 2 diam^(-2p)");
  c->add_option("--c0", o.c0, "Expectation-bound constant c0");
  c->add_option("--c1", o.c1, "Exponential rate constant c1");
  c->add_option("--c2", o.c2, "Bias constant c2");
  c->add_option("--q", o.q, "Rate exponent q in (0, 1/2), overrides --delta");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Weighted Wasserstein DRO toolkit: weights, bounds, transport, robust newsvendor and experiments"};
  app.name(args.empty() ? "wdro" : args.front());
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Random seed (unsigned 64-bit)");
  app.add_option("--out", o.out, "Output directory (default: $WDRO_OUT_DIR, else stdout)");
  app.add_option("--format", o.format, "Output format: csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--preset", o.preset, "Named configuration: desk, paper, fig1, fig2, fig3")
      ->check(CLI::IsMember({"desk", "paper", "fig1", "fig2", "fig3"}));

  auto* weights = app.add_subcommand("weights", "Observation weightings");
  weights->require_subcommand(1);
  auto* w_opt = weights->add_subcommand("optimal", "Optimal weights for order p (--preset fig2 for the p = 1..5 series)");
  auto* w_p1 = weights->add_subcommand("p1", "Closed-form triangular weights for p = 1");
  auto* w_win = weights->add_subcommand("window", "Sliding-window weights (tuned from eps/rho unless --s is given)");
  auto* w_smooth = weights->add_subcommand("smooth", "Exponential smoothing weights (tuned unless --alpha is given)");
  for (auto* c : {w_opt, w_p1, w_win, w_smooth}) {
    c->add_option("--T", o.T, "History length T (observations)");
    add_ratio_flags(c, o);
  }
  w_opt->add_option("--p", o.p, "Wasserstein order p (>= 1)");
  w_win->add_option("--s", o.window, "Window length (observations)");
  w_smooth->add_option("--alpha", o.alpha, "Smoothing rate alpha in [0, 1]");

  auto* bound = app.add_subcommand("bound", "Tail-probability bounds");
  bound->require_subcommand(1);
  auto* b_stat = bound->add_subcommand("stationary", "Stationary bound at effective sample size N_eff");
  auto* b_drift = bound->add_subcommand("drift", "Drifting bound for a weighting over T observations");
  b_stat->add_option("--N", o.n_eff, "Effective sample size (observations)");
  b_stat->add_option("--eps", o.eps, "Radius eps (distance units)");
  add_bound_flags(b_stat, o);
  b_drift->add_option("--T", o.T, "History length T (observations)");
  b_drift->add_option("--eps", o.eps, "Radius eps (distance units)");
  b_drift->add_option("--rho", o.rho, "Drift bound rho (distance units per period)");
  b_drift->add_option("--weighting", o.weighting, "Weighting: optimal, uniform or recent")
      ->check(CLI::IsMember({"optimal", "uniform", "recent"}));
  add_bound_flags(b_drift, o);

  auto* radius = app.add_subcommand("radius", "Minimal p = 1 confidence radius under drift");
  radius->add_option("--beta", o.beta, "Violation probability beta in (0, 1)");
  radius->add_option("--rho", o.rho, "Drift bound rho (distance units per period)");
  radius->add_option("--T", o.T, "History length T (observations)");
  radius->add_option("--bias", o.bias, "Bias constant (multiplies N_eff^-q)");
  radius->add_option("--rate", o.rate, "Rate constant (multiplies N_eff in the exponent)");
  radius->add_option("--q", o.radius_q, "Rate exponent q in (0, 1/2)");

  auto* mc = app.add_subcommand("montecarlo", "Monte-Carlo tail frequency of the weighted empirical distance");
  mc->add_option("--family", o.family, "Drift family: stationary-binomial, shifted-binomial, shifted-uniform-atoms");
  mc->add_option("--rho", o.rho, "Per-period shift rho (distance units)");
  mc->add_option("--T", o.T, "History length T (observations)");
  mc->add_option("--trials", o.trials, "Monte-Carlo trials");
  mc->add_option("--eps", o.eps, "Radius eps (distance units)");
  mc->add_option("--n", o.binom_n, "Binomial trials n (binomial families)");
  mc->add_option("--theta", o.theta, "Binomial success probability");
  mc->add_option("--atoms", o.atoms, "Number of equally spaced atoms on [0, 1] (atom family)");
  mc->add_option("--weighting", o.weighting, "Weighting: optimal, uniform or recent")
      ->check(CLI::IsMember({"optimal", "uniform", "recent"}));
  add_bound_flags(mc, o);

  auto* wass = app.add_subcommand("wass", "Wasserstein distance between two discrete laws");
  wass->add_option("--P", o.P, "First law: JSON file or inline {\"atoms\":[...],\"masses\":[...]}");
  wass->add_option("--Q", o.Q, "Second law: JSON file or inline JSON");
  wass->add_option("--p", o.order, "Order p (>= 1) or 'inf'");

  auto* dro = app.add_subcommand("dro", "Worst-case expectations and robust newsvendor orders");
  dro->require_subcommand(1);
  auto* d_wc = dro->add_subcommand("worst-case", "Worst-case expected loss over an ambiguity set");
  auto* d_order = dro->add_subcommand("order", "Robust newsvendor order quantity");
  for (auto* c : {d_wc, d_order}) {
    c->add_option("--instance", o.instance, "Instance: JSON file or inline JSON");
    c->add_option("--method", o.method, "Solver for weighted balls: dual or grid")->check(CLI::IsMember({"dual", "grid"}));
    c->add_option("--grid", o.grid, "Grid points of the LP over the support");
  }
  d_order->add_option("--c-u", o.c_u, "Underage cost per unit (currency per demand unit)");
  d_order->add_option("--c-o", o.c_o, "Overage cost per unit (currency per demand unit)");

  auto* sim = app.add_subcommand("simulate", "Ex-post parameter sweep of the newsvendor experiment");
  sim->add_option("--delta", o.deltas, "Random-walk half-widths delta (probability units); repeatable");
  sim->add_option("--simulations", o.simulations, "Simulations averaged per cell");
  sim->add_option("--jumps", o.jumps, "Next-period draws averaged when scoring an order");
  sim->add_option("--methods", o.methods, "Subset of: saa, smoothing, weighted, intersection");
  sim->add_option("--n", o.demand_n, "Consumers (demand upper bound, units)");
  sim->add_option("--T", o.history, "History length T (periods)");
  sim->add_option("--theta1", o.theta1, "Initial success probability");

  auto* geo = app.add_subcommand("geometry", "Which uniform laws lie in the weighted ball and the intersection");
  geo->add_option("--obs", o.obs, "Observations, oldest first (distance units)");
  geo->add_option("--eps", o.geo_eps, "Weighted-ball radius (distance units)");
  geo->add_option("--rho", o.geo_rho, "Drift bound (distance units per period)");
  geo->add_option("--p", o.geo_p, "Wasserstein order p");
  geo->add_option("--scale", o.scale, "Factor applied to the intersection radii");
  geo->add_option("--mean-min", o.mean_min, "Smallest mean on the grid (distance units)");
  geo->add_option("--mean-max", o.mean_max, "Largest mean on the grid (distance units)");
  geo->add_option("--std-min", o.std_min, "Smallest standard deviation (distance units)");
  geo->add_option("--std-max", o.std_max, "Largest standard deviation (distance units)");
  geo->add_option("--resolution", o.resolution, "Grid points per axis");

  std::vector<std::string> argv_tail;
  for (std::size_t i = args.size(); i > 1; --i) argv_tail.push_back(args[i - 1]);
  try {
    app.parse(argv_tail);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    err << '\n' << app.help();
    return kExitUsage;
  }

  try {
    Output result;
    std::string default_format = "json";
    if (*w_opt) {
      result = cmd_weights_optimal(o);
      if (o.preset == "fig2") default_format = "csv";
    } else if (*w_p1) {
      result = cmd_weights_p1(o);
    } else if (*w_win) {
      result = cmd_weights_window(o);
    } else if (*w_smooth) {
      result = cmd_weights_smooth(o);
    } else if (*b_stat) {
      result = cmd_bound_stationary(o);
    } else if (*b_drift) {
      result = cmd_bound_drift(o);
    } else if (*radius) {
      result = cmd_radius(o);
    } else if (*mc) {
      result = cmd_montecarlo(o);
    } else if (*wass) {
      result = cmd_wass(o);
    } else if (*d_wc) {
      result = cmd_dro_worst_case(o);
    } else if (*d_order) {
      result = cmd_dro_order(o);
    } else if (*sim) {
      result = cmd_simulate(o);
      default_format = "csv";
    } else if (*geo) {
      result = cmd_geometry(o);
      default_format = "csv";
    } else {
      throw UsageError("no subcommand given");
    }
    const std::string fmt = o.format.empty() ? default_format : o.format;
    std::string dir = o.out;
    if (dir.empty()) {
      if (const char* env = std::getenv("WDRO_OUT_DIR")) dir = env;
    }
    write_files(render(result, fmt == "csv" ? Format::Csv : Format::Json), dir, out);
    return kExitOk;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace wdro::cli
