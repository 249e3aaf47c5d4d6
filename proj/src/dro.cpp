#include "wdro/dro.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wdro/simplex.hpp"

namespace wdro {

namespace {

void require_support(double lo, double hi, const char* who) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument(std::string(who) + ": support bounds must be finite with lo < hi");
  }
}

void require_order(double p, const char* who) {
  if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument(std::string(who) + ": p must be finite and >= 1");
}

double abs_pow(double d, double p) {
  const double a = std::abs(d);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

double merge_tolerance(double lo, double hi) { return 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)); }

// Uniform grid on [lo, hi] plus `extra` points; extra points are kept exactly
// and displace uniform points that nearly coincide with them.
std::vector<double> build_grid(std::size_t grid_size, double lo, double hi, std::vector<double> extra) {
  if (grid_size < 2) throw std::invalid_argument("grid size must be at least 2");
  const double tol = merge_tolerance(lo, hi);
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end(), [&](double a, double b) { return std::abs(a - b) <= tol; }),
              extra.end());
  std::vector<double> grid;
  grid.reserve(grid_size + extra.size());
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double g = j + 1 == grid_size ? hi : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(grid_size - 1);
    auto it = std::lower_bound(extra.begin(), extra.end(), g - tol);
    if (it != extra.end() && std::abs(*it - g) <= tol) continue;
    grid.push_back(g);
  }
  grid.insert(grid.end(), extra.begin(), extra.end());
  std::sort(grid.begin(), grid.end());
  return grid;
}

bool grid_contains(const std::vector<double>& sorted_grid, double x, double tol) {
  auto it = std::lower_bound(sorted_grid.begin(), sorted_grid.end(), x - tol);
  return it != sorted_grid.end() && std::abs(*it - x) <= tol;
}

struct InnerSup {
  double value;
  double transport;  // |xi* - xi_t|^p at the maximizer
};

// sup over xi in [lo, hi] of l(xi) - lambda |xi - center|^p.
InnerSup inner_sup(const PiecewiseAffineLoss& loss, double center, double lambda, double p, double lo, double hi) {
  InnerSup best{-std::numeric_limits<double>::infinity(), 0.0};
  const auto offer = [&](const AffinePiece& piece, double xi) {
    const double cost = abs_pow(xi - center, p);
    const double v = piece.slope * xi + piece.intercept - lambda * cost;
    if (v > best.value || (v == best.value && cost < best.transport)) best = {v, cost};
  };
  for (const AffinePiece& piece : loss.pieces()) {
    if (p == 1.0) {
      offer(piece, lo);
      offer(piece, hi);
      offer(piece, center);
      continue;
    }
    // Strictly concave in xi: the clipped stationary point is the maximizer.
    if (lambda == 0.0) {
      offer(piece, piece.slope > 0.0 ? hi : piece.slope < 0.0 ? lo : center);
      continue;
    }
    const double ratio = std::abs(piece.slope) / (lambda * p);
    const double reach = p == 2.0 ? ratio : std::pow(ratio, 1.0 / (p - 1.0));
    offer(piece, std::clamp(piece.slope >= 0.0 ? center + reach : center - reach, lo, hi));
  }
  return best;
}

}  // namespace

PiecewiseAffineLoss::PiecewiseAffineLoss(std::vector<AffinePiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("PiecewiseAffineLoss: at least one piece is required");
  for (const AffinePiece& p : pieces_) {
    if (!std::isfinite(p.slope) || !std::isfinite(p.intercept)) {
      throw std::invalid_argument("PiecewiseAffineLoss: coefficients must be finite");
    }
  }
}

PiecewiseAffineLoss PiecewiseAffineLoss::newsvendor(double x, double c_u, double c_o) {
  if (!(c_u > 0.0 && c_o > 0.0)) throw std::invalid_argument("newsvendor: costs must be positive");
  return PiecewiseAffineLoss({{c_u, -c_u * x}, {-c_o, c_o * x}});
}

double PiecewiseAffineLoss::operator()(double xi) const {
  double v = -std::numeric_limits<double>::infinity();
  for (const AffinePiece& p : pieces_) v = std::max(v, p.slope * xi + p.intercept);
  return v;
}

double PiecewiseAffineLoss::max_abs_slope() const {
  double m = 0.0;
  for (const AffinePiece& p : pieces_) m = std::max(m, std::abs(p.slope));
  return m;
}

std::vector<double> PiecewiseAffineLoss::kinks_in(double lo, double hi) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
      const AffinePiece& a = pieces_[i];
      const AffinePiece& b = pieces_[j];
      if (a.slope == b.slope) continue;
      const double x = (b.intercept - a.intercept) / (a.slope - b.slope);
      if (!(x > lo && x < hi)) continue;
      const double va = a.slope * x + a.intercept;
      const double top = (*this)(x);
      if (top - va <= 1e-12 * (1.0 + std::abs(top))) out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void WeightedBall::validate() const {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("WeightedBall: eps must be finite and >= 0");
  require_order(p, "WeightedBall");
  require_support(lo, hi, "WeightedBall");
  if (center.min() < lo || center.max() > hi) throw std::invalid_argument("WeightedBall: center atoms outside the support");
}

void IntersectionSet::validate() const {
  if (points.empty()) throw std::invalid_argument("IntersectionSet: at least one point is required");
  if (points.size() != radii.size()) throw std::invalid_argument("IntersectionSet: one radius per point is required");
  require_order(p, "IntersectionSet");
  require_support(lo, hi, "IntersectionSet");
  for (double r : radii) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("IntersectionSet: radii must be finite and >= 0");
  }
  for (double x : points) {
    if (!(x >= lo && x <= hi)) throw std::invalid_argument("IntersectionSet: points outside the support");
  }
}

double worst_case_dual(const PiecewiseAffineLoss& loss, const WeightedBall& ball) {
  ball.validate();
  const auto atoms = ball.center.atoms();
  const auto masses = ball.center.masses();
  if (ball.eps == 0.0) {
    double v = 0.0;
    for (std::size_t t = 0; t < atoms.size(); ++t) v += masses[t] * loss(atoms[t]);
    return v;
  }
  const double budget = abs_pow(ball.eps, ball.p);
  const auto evaluate = [&](double lambda, double* subgradient) {
    double v = lambda * budget;
    double used = 0.0;
    for (std::size_t t = 0; t < atoms.size(); ++t) {
      const InnerSup s = inner_sup(loss, atoms[t], lambda, ball.p, ball.lo, ball.hi);
      v += masses[t] * s.value;
      used += masses[t] * s.transport;
    }
    if (subgradient) *subgradient = budget - used;
    return v;
  };

  const double diam = ball.hi - ball.lo;
  double lambda_hi = loss.max_abs_slope() * std::pow(diam, ball.p - 1.0) + 1.0;
  for (int i = 0; i < 200; ++i) {
    double g = 0.0;
    evaluate(lambda_hi, &g);
    if (g >= 0.0) break;
    lambda_hi *= 2.0;
  }
  const auto h = [&](double lambda) { return evaluate(lambda, nullptr); };
  const ScalarMinimum m = golden_section(h, 0.0, lambda_hi, 1e-12 * (1.0 + lambda_hi));
  return std::min({m.value, h(0.0), h(lambda_hi)});
}

struct GridBallSolver::Impl {
  WeightedBall ball;
  std::vector<double> grid;
  std::vector<double> column_point;
  std::size_t base_columns = 0;
  double tol;
  lp::Solver solver;

  static std::vector<lp::Sense> senses(std::size_t T) {
    std::vector<lp::Sense> s(T, lp::Sense::Equal);
    s.push_back(lp::Sense::LessEqual);
    return s;
  }
  static std::vector<double> rhs(const WeightedBall& b) {
    std::vector<double> r(b.center.masses().begin(), b.center.masses().end());
    r.push_back(abs_pow(b.eps, b.p));
    return r;
  }

  Impl(WeightedBall b, std::size_t grid_size)
      : ball(std::move(b)), tol(merge_tolerance(ball.lo, ball.hi)), solver(senses(ball.center.size()), rhs(ball)) {
    ball.validate();
    const auto atoms = ball.center.atoms();
    grid = build_grid(grid_size, ball.lo, ball.hi, std::vector<double>(atoms.begin(), atoms.end()));
    for (double g : grid) add_point(g);
    base_columns = column_point.size();
  }

  void add_point(double g) {
    const auto atoms = ball.center.atoms();
    const std::size_t T = atoms.size();
    for (std::size_t t = 0; t < T; ++t) {
      const lp::Entry entries[2] = {{t, 1.0}, {T, abs_pow(g - atoms[t], ball.p)}};
      solver.add_column(0.0, entries);
      column_point.push_back(g);
    }
  }

  double evaluate(const PiecewiseAffineLoss& loss) {
    // Kink columns of the previous loss are replaced, not accumulated.
    solver.truncate_columns(base_columns);
    column_point.resize(base_columns);
    for (double k : loss.kinks_in(ball.lo, ball.hi)) {
      if (!grid_contains(grid, k, tol)) add_point(k);
    }
    for (std::size_t c = 0; c < column_point.size(); ++c) solver.set_cost(c, loss(column_point[c]));
    const lp::Solution sol = solver.maximize();
    if (sol.status != lp::Status::Optimal) throw std::runtime_error("worst_case_grid_lp: transport LP not optimal");
    return sol.objective;
  }
};

GridBallSolver::GridBallSolver(WeightedBall ball, std::size_t grid_size)
    : impl_(std::make_unique<Impl>(std::move(ball), grid_size)) {}
GridBallSolver::~GridBallSolver() = default;
GridBallSolver::GridBallSolver(GridBallSolver&&) noexcept = default;
GridBallSolver& GridBallSolver::operator=(GridBallSolver&&) noexcept = default;
double GridBallSolver::evaluate(const PiecewiseAffineLoss& loss) { return impl_->evaluate(loss); }

double worst_case_grid_lp(const PiecewiseAffineLoss& loss, const WeightedBall& ball, std::size_t grid_size) {
  GridBallSolver solver(ball, grid_size);
  return solver.evaluate(loss);
}

namespace {

// Indices of the per-point constraints that are not implied by the others.
// For p = 2 each constraint reads m2 - 2 y_t m1 <= r_t^2 - y_t^2 in the first
// two moments (after centering), so only lines on the lower envelope over
// the support matter.
std::vector<std::size_t> active_constraints(const IntersectionSet& set) {
  const std::size_t T = set.points.size();
  std::vector<std::size_t> all(T);
  for (std::size_t t = 0; t < T; ++t) all[t] = t;
  if (set.p != 2.0) return all;

  const double shift = 0.5 * (set.lo + set.hi);
  const double lo = set.lo - shift;
  const double hi = set.hi - shift;
  std::vector<double> slope(T);
  std::vector<double> icpt(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double y = set.points[t] - shift;
    slope[t] = 2.0 * y;
    icpt[t] = set.radii[t] * set.radii[t] - y * y;
  }
  const double tol = 1e-9 * (hi - lo);
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < T; ++k) {
    double a = lo;
    double b = hi;
    bool dominated = false;
    for (std::size_t j = 0; j < T && !dominated; ++j) {
      if (j == k) continue;
      if (slope[j] == slope[k]) {
        dominated = icpt[j] < icpt[k] || (icpt[j] == icpt[k] && j < k);
      } else if (slope[k] > slope[j]) {
        b = std::min(b, (icpt[j] - icpt[k]) / (slope[k] - slope[j]));
      } else {
        a = std::max(a, (icpt[k] - icpt[j]) / (slope[j] - slope[k]));
      }
    }
    if (!dominated && a <= b + tol) kept.push_back(k);
  }
  return kept;
}

}  // namespace

struct IntersectionSolver::Impl {
  IntersectionSet set;
  std::vector<double> grid;
  std::vector<double> column_point;
  std::vector<std::size_t> rows;
  double tol;
  int doublings = 0;
  std::unique_ptr<lp::Solver> solver;

  Impl(IntersectionSet s, std::size_t grid_size) : set(std::move(s)), tol(merge_tolerance(set.lo, set.hi)) {
    set.validate();
    grid = build_grid(grid_size, set.lo, set.hi, set.points);
    const bool all_zero = std::all_of(set.radii.begin(), set.radii.end(), [](double r) { return r == 0.0; });
    for (;; ++doublings) {
      build();
      if (solver->maximize().status == lp::Status::Optimal) return;
      if (all_zero || doublings >= 64) {
        throw std::runtime_error("worst_case_intersection: intersection stays empty after " + std::to_string(doublings) +
                                 " doublings");
      }
      for (double& r : set.radii) r *= 2.0;
    }
  }

  void build() {
    rows = active_constraints(set);
    std::vector<lp::Sense> senses(rows.size() + 1, lp::Sense::LessEqual);
    senses[0] = lp::Sense::Equal;
    std::vector<double> rhs(rows.size() + 1, 1.0);
    for (std::size_t r = 0; r < rows.size(); ++r) rhs[r + 1] = abs_pow(set.radii[rows[r]], set.p);
    solver = std::make_unique<lp::Solver>(std::move(senses), std::move(rhs));
    column_point.clear();
    for (double g : grid) add_point(g);
  }

  void add_point(double g) {
    std::vector<lp::Entry> entries;
    entries.reserve(rows.size() + 1);
    entries.push_back({0, 1.0});
    for (std::size_t r = 0; r < rows.size(); ++r) entries.push_back({r + 1, abs_pow(g - set.points[rows[r]], set.p)});
    solver->add_column(0.0, entries);
    column_point.push_back(g);
  }

  double evaluate(const PiecewiseAffineLoss& loss) {
    solver->truncate_columns(grid.size());
    column_point.resize(grid.size());
    for (double k : loss.kinks_in(set.lo, set.hi)) {
      if (!grid_contains(grid, k, tol)) add_point(k);
    }
    for (std::size_t c = 0; c < column_point.size(); ++c) solver->set_cost(c, loss(column_point[c]));
    const lp::Solution sol = solver->maximize();
    if (sol.status != lp::Status::Optimal) throw std::runtime_error("worst_case_intersection: LP not optimal");
    return sol.objective;
  }
};

IntersectionSolver::IntersectionSolver(IntersectionSet set, std::size_t grid_size)
    : impl_(std::make_unique<Impl>(std::move(set), grid_size)) {}
IntersectionSolver::~IntersectionSolver() = default;
IntersectionSolver::IntersectionSolver(IntersectionSolver&&) noexcept = default;
IntersectionSolver& IntersectionSolver::operator=(IntersectionSolver&&) noexcept = default;
int IntersectionSolver::doublings() const { return impl_->doublings; }
double IntersectionSolver::evaluate(const PiecewiseAffineLoss& loss) { return impl_->evaluate(loss); }

IntersectionValue worst_case_intersection(const PiecewiseAffineLoss& loss, const IntersectionSet& set,
                                          std::size_t grid_size) {
  IntersectionSolver solver(set, grid_size);
  const double v = solver.evaluate(loss);
  return {v, solver.doublings()};
}

std::string_view to_string(DroMethod m) { return m == DroMethod::Dual ? "dual" : "grid"; }

DroMethod parse_dro_method(std::string_view tag) {
  if (tag == "dual") return DroMethod::Dual;
  if (tag == "grid") return DroMethod::Grid;
  throw std::invalid_argument("unknown DRO method '" + std::string(tag) + "'");
}

OrderDecision newsvendor_order(const AmbiguitySpec& spec, double c_u, double c_o, DroMethod method,
                               std::size_t grid_size) {
  if (!(c_u > 0.0 && c_o > 0.0)) throw std::invalid_argument("newsvendor_order: costs must be positive");
  constexpr double kTolX = 1e-6;

  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> atoms;
  std::function<double(double)> f;
  std::unique_ptr<GridBallSolver> ball_solver;
  std::unique_ptr<IntersectionSolver> cap_solver;
  int doublings = 0;

  if (const auto* ball = std::get_if<WeightedBall>(&spec)) {
    ball->validate();
    lo = ball->lo;
    hi = ball->hi;
    atoms.assign(ball->center.atoms().begin(), ball->center.atoms().end());
    if (method == DroMethod::Dual) {
      f = [ball, c_u, c_o](double x) { return worst_case_dual(PiecewiseAffineLoss::newsvendor(x, c_u, c_o), *ball); };
    } else {
      ball_solver = std::make_unique<GridBallSolver>(*ball, grid_size);
      f = [&ball_solver, c_u, c_o](double x) { return ball_solver->evaluate(PiecewiseAffineLoss::newsvendor(x, c_u, c_o)); };
    }
  } else {
    const auto& set = std::get<IntersectionSet>(spec);
    set.validate();
    lo = set.lo;
    hi = set.hi;
    atoms = set.points;
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    cap_solver = std::make_unique<IntersectionSolver>(set, grid_size);
    doublings = cap_solver->doublings();
    f = [&cap_solver, c_u, c_o](double x) { return cap_solver->evaluate(PiecewiseAffineLoss::newsvendor(x, c_u, c_o)); };
  }

  const ScalarMinimum best = golden_section(f, lo, hi, kTolX);
  const double threshold = best.value + 1e-9 * (1.0 + std::abs(best.value));
  double x = best.x;
  double value = best.value;

  // Leftmost near-optimal point.
  if (x - lo > 2.0 * kTolX && f(x - 2.0 * kTolX) <= threshold) {
    const double f_lo = f(lo);
    if (f_lo <= threshold) {
      x = lo;
      value = f_lo;
    } else {
      double a = lo;
      double b = x;
      while (b - a > 0.1 * kTolX) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm <= threshold) {
          b = mid;
          value = fm;
        } else {
          a = mid;
        }
      }
      x = b;
    }
  }

  // Snap onto an adjacent atom when it is as good.
  auto above = std::lower_bound(atoms.begin(), atoms.end(), x);
  std::vector<double> candidates;
  if (above != atoms.begin()) candidates.push_back(*std::prev(above));
  if (above != atoms.end()) candidates.push_back(*above);
  for (double a : candidates) {
    if (a < lo || a > hi || a == x) continue;
    const double fa = f(a);
    if (fa <= threshold) {
      x = a;
      value = fa;
      break;
    }
  }
  return {x, value, doublings};
}

double saa_order(const DiscreteDistribution1D& empirical, double c_u, double c_o) {
  if (!(c_u > 0.0 && c_o > 0.0)) throw std::invalid_argument("saa_order: costs must be positive");
  return empirical.quantile(c_u / (c_u + c_o));
}

}  // namespace wdro
