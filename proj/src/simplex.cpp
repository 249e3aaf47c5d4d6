#include "wdro/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wdro::lp {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-13;
constexpr std::size_t kRefactorEvery = 100;
constexpr std::size_t kBlandAfter = 50;
constexpr std::size_t kTraceLength = 32;

std::string describe_what(const std::string& what, const std::vector<std::string>& trace) {
  std::string out = what;
  if (!trace.empty()) out += " (last: " + trace.back() + ")";
  return out;
}

}  // namespace

LpError::LpError(const std::string& what, std::vector<std::string> trace)
    : std::runtime_error(describe_what(what, trace)), trace_(std::move(trace)) {}

Solver::Solver(std::vector<Sense> senses, std::vector<double> rhs) : senses_(std::move(senses)), rhs_(std::move(rhs)) {
  if (senses_.empty()) throw std::invalid_argument("lp::Solver: at least one row is required");
  if (senses_.size() != rhs_.size()) throw std::invalid_argument("lp::Solver: senses and rhs differ in length");
  for (double v : rhs_) {
    if (!std::isfinite(v)) throw std::invalid_argument("lp::Solver: rhs must be finite");
  }
}

std::size_t Solver::add_column(double cost, std::span<const Entry> entries) {
  if (!std::isfinite(cost)) throw std::invalid_argument("lp::Solver: cost must be finite");
  Column col{{}, cost};
  for (const Entry& e : entries) {
    if (e.row >= rows()) throw std::invalid_argument("lp::Solver: entry row out of range");
    if (!std::isfinite(e.value)) throw std::invalid_argument("lp::Solver: entry must be finite");
    if (e.value != 0.0) col.entries.push_back(e);
  }
  columns_.push_back(std::move(col));
  in_basis_structural_.push_back(0);
  return columns_.size() - 1;
}

void Solver::truncate_columns(std::size_t count) {
  if (count >= columns_.size()) return;
  for (std::size_t j = count; j < columns_.size(); ++j) {
    if (j < in_basis_structural_.size() && in_basis_structural_[j]) warm_ = false;
  }
  columns_.resize(count);
  in_basis_structural_.resize(count);
}

void Solver::set_cost(std::size_t column, double cost) {
  if (column >= columns_.size()) throw std::out_of_range("lp::Solver: column out of range");
  if (!std::isfinite(cost)) throw std::invalid_argument("lp::Solver: cost must be finite");
  columns_[column].cost = cost;
}

void Solver::set_rhs(std::span<const double> rhs) {
  if (rhs.size() != rows()) throw std::invalid_argument("lp::Solver: rhs length differs from row count");
  rhs_.assign(rhs.begin(), rhs.end());
  warm_ = false;
}

std::size_t Solver::var_id(VarRef v) const {
  switch (v.kind) {
    case Kind::Structural: return v.index;
    case Kind::Slack: return columns_.size() + v.index;
    case Kind::Artificial: return columns_.size() + rows() + v.index;
  }
  return 0;
}

void Solver::note(const std::string& line) {
  trace_.push_back(line);
  if (trace_.size() > kTraceLength) trace_.pop_front();
}

void Solver::fail(const std::string& what) const {
  throw LpError(what, std::vector<std::string>(trace_.begin(), trace_.end()));
}

void Solver::load_column(VarRef v, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  switch (v.kind) {
    case Kind::Structural:
      for (const Entry& e : columns_[v.index].entries) out[e.row] = factor_[e.row] * e.value;
      break;
    case Kind::Slack:
      out[v.index] = factor_[v.index] * (senses_[v.index] == Sense::LessEqual ? 1.0 : -1.0);
      break;
    case Kind::Artificial:
      out[v.index] = 1.0;
      break;
  }
}

double Solver::phase_cost(VarRef v, int phase) const {
  if (phase == 1) return v.kind == Kind::Artificial ? -1.0 : 0.0;
  return v.kind == Kind::Structural ? columns_[v.index].cost : 0.0;
}

bool Solver::may_enter(VarRef v, int /*phase*/) const {
  switch (v.kind) {
    case Kind::Structural: return !in_basis_structural_[v.index];
    case Kind::Slack: return senses_[v.index] != Sense::Equal && !in_basis_slack_[v.index];
    case Kind::Artificial: return false;
  }
  return false;
}

void Solver::reset() {
  const std::size_t m = rows();
  factor_.assign(m, 1.0);
  for (const Column& c : columns_) {
    for (const Entry& e : c.entries) factor_[e.row] = std::max(factor_[e.row], std::abs(e.value));
  }
  // factor_ currently holds the row scale; fold in the sign flip.
  for (std::size_t i = 0; i < m; ++i) {
    const double scale = 1.0 / factor_[i];
    factor_[i] = rhs_[i] < 0.0 ? -scale : scale;
  }
  b_.resize(m);
  for (std::size_t i = 0; i < m; ++i) b_[i] = factor_[i] * rhs_[i];

  basis_.clear();
  in_basis_structural_.assign(columns_.size(), 0);
  in_basis_slack_.assign(m, 0);
  in_basis_artificial_.assign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const bool slack_ok = senses_[i] != Sense::Equal && factor_[i] * (senses_[i] == Sense::LessEqual ? 1.0 : -1.0) > 0.0;
    if (slack_ok) {
      basis_.push_back({Kind::Slack, i});
      in_basis_slack_[i] = 1;
    } else {
      basis_.push_back({Kind::Artificial, i});
      in_basis_artificial_[i] = 1;
    }
  }
  refactor();
}

void Solver::refactor() {
  const std::size_t m = rows();
  std::vector<double> bmat(m * m, 0.0);
  std::vector<double> col(m);
  for (std::size_t j = 0; j < m; ++j) {
    load_column(basis_[j], col);
    for (std::size_t i = 0; i < m; ++i) bmat[i * m + j] = col[i];
  }
  binv_.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) binv_[i * m + i] = 1.0;
  // Gauss-Jordan with partial pivoting.
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < m; ++i) {
      if (std::abs(bmat[i * m + k]) > std::abs(bmat[piv * m + k])) piv = i;
    }
    if (std::abs(bmat[piv * m + k]) < kSingularTol) fail("lp: singular basis during refactorization");
    if (piv != k) {
      for (std::size_t j = 0; j < m; ++j) {
        std::swap(bmat[k * m + j], bmat[piv * m + j]);
        std::swap(binv_[k * m + j], binv_[piv * m + j]);
      }
    }
    const double d = bmat[k * m + k];
    for (std::size_t j = 0; j < m; ++j) {
      bmat[k * m + j] /= d;
      binv_[k * m + j] /= d;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (i == k) continue;
      const double f = bmat[i * m + k];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        bmat[i * m + j] -= f * bmat[k * m + j];
        binv_[i * m + j] -= f * binv_[k * m + j];
      }
    }
  }
  xb_.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += binv_[i * m + k] * b_[k];
    xb_[i] = acc;
  }
}

void Solver::prepare() {
  cost_scale_ = 1.0;
  for (const Column& c : columns_) cost_scale_ = std::max(cost_scale_, std::abs(c.cost));
  if (!warm_) {
    reset();
    return;
  }
  // Columns added since the last solve enter as nonbasic at zero.
  in_basis_structural_.resize(columns_.size(), 0);
  refactor();
}

bool Solver::run_phase(int phase) {
  const std::size_t m = rows();
  const std::size_t n_struct = columns_.size();
  const std::size_t limit = 100 * (m + n_struct) + 1000;
  const double dual_tol = phase == 1 ? kDualTol : kDualTol * cost_scale_;
  std::vector<double> y(m);
  std::vector<double> u(m);
  std::vector<double> col(m);
  std::size_t since_refactor = 0;
  std::size_t degenerate = 0;

  for (std::size_t local = 0;; ++local) {
    if (local > limit) fail("lp: iteration limit exceeded");
    if (since_refactor >= kRefactorEvery) {
      refactor();
      since_refactor = 0;
    }
    for (std::size_t k = 0; k < m; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += phase_cost(basis_[i], phase) * binv_[i * m + k];
      y[k] = acc;
    }
    const bool bland = degenerate >= kBlandAfter;

    // Pricing.
    VarRef enter{Kind::Structural, 0};
    bool found = false;
    double best = dual_tol;
    const auto consider = [&](VarRef v, double d) {
      if (d <= dual_tol) return false;
      if (bland) {
        enter = v;
        found = true;
        return true;
      }
      if (d > best) {
        best = d;
        enter = v;
        found = true;
      }
      return false;
    };
    bool stop = false;
    for (std::size_t j = 0; j < n_struct && !stop; ++j) {
      const VarRef v{Kind::Structural, j};
      if (!may_enter(v, phase)) continue;
      double d = phase_cost(v, phase);
      for (const Entry& e : columns_[j].entries) d -= y[e.row] * factor_[e.row] * e.value;
      stop = consider(v, d);
    }
    for (std::size_t i = 0; i < m && !stop; ++i) {
      const VarRef v{Kind::Slack, i};
      if (!may_enter(v, phase)) continue;
      const double d = -y[i] * factor_[i] * (senses_[i] == Sense::LessEqual ? 1.0 : -1.0);
      stop = consider(v, d);
    }
    if (!found) return true;

    load_column(enter, col);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (col[k] != 0.0) acc += binv_[i * m + k] * col[k];
      }
      u[i] = acc;
    }

    // Ratio test. Artificials left in the basis after phase one sit at zero
    // and block any direction that would move them.
    std::size_t leave = m;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      double ratio;
      if (phase == 2 && basis_[i].kind == Kind::Artificial && std::abs(u[i]) > kPivotTol) {
        ratio = 0.0;
      } else if (u[i] > kPivotTol) {
        ratio = std::max(xb_[i], 0.0) / u[i];
      } else {
        continue;
      }
      bool take = false;
      if (leave == m || ratio < theta - 1e-12 * (1.0 + theta)) {
        take = true;
      } else if (ratio <= theta + 1e-12 * (1.0 + theta)) {
        take = bland ? var_id(basis_[i]) < var_id(basis_[leave]) : std::abs(u[i]) > std::abs(u[leave]);
      }
      if (take) {
        leave = i;
        theta = ratio;
      }
    }
    if (leave == m) return false;

    const double pivot = u[leave];
    for (std::size_t k = 0; k < m; ++k) binv_[leave * m + k] /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || u[i] == 0.0) continue;
      const double f = u[i];
      for (std::size_t k = 0; k < m; ++k) binv_[i * m + k] -= f * binv_[leave * m + k];
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (i != leave) xb_[i] -= theta * u[i];
    }
    xb_[leave] = theta;

    const VarRef out = basis_[leave];
    switch (out.kind) {
      case Kind::Structural: in_basis_structural_[out.index] = 0; break;
      case Kind::Slack: in_basis_slack_[out.index] = 0; break;
      case Kind::Artificial: in_basis_artificial_[out.index] = 0; break;
    }
    switch (enter.kind) {
      case Kind::Structural: in_basis_structural_[enter.index] = 1; break;
      case Kind::Slack: in_basis_slack_[enter.index] = 1; break;
      case Kind::Artificial: break;
    }
    basis_[leave] = enter;
    degenerate = theta <= 1e-12 ? degenerate + 1 : 0;
    ++since_refactor;
    ++iterations_;

    char buf[160];
    std::snprintf(buf, sizeof buf, "iter %zu phase %d enter %zu leave-row %zu step %.3e pivot %.3e%s", iterations_, phase,
                  var_id(enter), leave, theta, pivot, bland ? " bland" : "");
    note(buf);
  }
}

Solution Solver::maximize() {
  const std::size_t m = rows();
  iterations_ = 0;
  prepare();

  if (!warm_) {
    bool any_artificial = false;
    for (const VarRef& v : basis_) any_artificial = any_artificial || v.kind == Kind::Artificial;
    if (any_artificial) {
      run_phase(1);
      refactor();
      double infeasibility = 0.0;
      double bmax = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (basis_[i].kind == Kind::Artificial) infeasibility += std::max(xb_[i], 0.0);
        bmax = std::max(bmax, b_[i]);
      }
      if (infeasibility > kPrimalTol * (1.0 + bmax)) {
        return {Status::Infeasible, 0.0, std::vector<double>(columns_.size(), 0.0), iterations_};
      }
      // Pivot zero-level artificials out wherever a real column can replace them.
      std::vector<double> col(m);
      for (std::size_t r = 0; r < m; ++r) {
        if (basis_[r].kind != Kind::Artificial) continue;
        const auto try_pivot = [&](VarRef v) {
          load_column(v, col);
          double ur = 0.0;
          for (std::size_t k = 0; k < m; ++k) ur += binv_[r * m + k] * col[k];
          if (std::abs(ur) <= 1e-7) return false;
          in_basis_artificial_[basis_[r].index] = 0;
          basis_[r] = v;
          if (v.kind == Kind::Structural) in_basis_structural_[v.index] = 1;
          else in_basis_slack_[v.index] = 1;
          refactor();
          return true;
        };
        bool done = false;
        for (std::size_t j = 0; j < columns_.size() && !done; ++j) {
          const VarRef v{Kind::Structural, j};
          if (may_enter(v, 2)) done = try_pivot(v);
        }
        for (std::size_t i = 0; i < m && !done; ++i) {
          const VarRef v{Kind::Slack, i};
          if (may_enter(v, 2)) done = try_pivot(v);
        }
      }
    }
    warm_ = true;
  }

  const bool bounded = run_phase(2);
  if (!bounded) return {Status::Unbounded, std::numeric_limits<double>::infinity(), {}, iterations_};
  refactor();

  Solution sol{Status::Optimal, 0.0, std::vector<double>(columns_.size(), 0.0), iterations_};
  for (std::size_t i = 0; i < m; ++i) {
    if (basis_[i].kind == Kind::Structural) sol.x[basis_[i].index] = std::max(xb_[i], 0.0);
  }
  for (std::size_t j = 0; j < columns_.size(); ++j) sol.objective += columns_[j].cost * sol.x[j];
  return sol;
}

}  // namespace wdro::lp
