// Revised primal simplex for small dense-row, sparse-column linear programs:
//   maximize c'x  subject to  A x (<=, =, >=) b,  x >= 0.
// The basis inverse is kept dense; columns are stored sparse. Columns can be
// appended and costs replaced between solves, in which case the previous
// optimal basis is reused as a primal-feasible start.
#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wdro::lp {

enum class Sense { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

/// Raised on numerical breakdown or iteration exhaustion. Carries the last
/// iterations of the solver for diagnosis.
class LpError : public std::runtime_error {
 public:
  LpError(const std::string& what, std::vector<std::string> trace);
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::vector<std::string> trace_;
};

struct Entry {
  std::size_t row;
  double value;
};

struct Solution {
  Status status;
  double objective;
  /// Values of the structural columns in insertion order.
  std::vector<double> x;
  std::size_t iterations;
};

class Solver {
 public:
  Solver(std::vector<Sense> senses, std::vector<double> rhs);

  std::size_t rows() const { return senses_.size(); }
  std::size_t columns() const { return columns_.size(); }

  /// Appends a structural column and returns its index.
  std::size_t add_column(double cost, std::span<const Entry> entries);
  /// Drops every column from index `count` on. If one of them is basic the
  /// next solve starts from scratch.
  void truncate_columns(std::size_t count);
  void set_cost(std::size_t column, double cost);
  /// Replaces the right-hand side. The next solve starts from scratch.
  void set_rhs(std::span<const double> rhs);

  Solution maximize();

 private:
  struct Column {
    std::vector<Entry> entries;
    double cost;
  };
  enum class Kind { Structural, Slack, Artificial };
  struct VarRef {
    Kind kind;
    std::size_t index;
  };

  void reset();
  void prepare();
  void refactor();
  // Scaled column of a variable, written densely into `out`.
  void load_column(VarRef v, std::vector<double>& out) const;
  // Runs one simplex phase; returns false on unboundedness.
  bool run_phase(int phase);
  double phase_cost(VarRef v, int phase) const;
  bool may_enter(VarRef v, int phase) const;
  std::size_t var_id(VarRef v) const;
  void note(const std::string& line);
  [[noreturn]] void fail(const std::string& what) const;

  std::vector<Sense> senses_;
  std::vector<double> rhs_;
  std::vector<Column> columns_;

  std::vector<double> factor_;   // row multiplier: sign flip times scale
  std::vector<double> b_;        // scaled right-hand side, nonnegative
  std::vector<VarRef> basis_;
  std::vector<char> in_basis_structural_;
  std::vector<char> in_basis_slack_;
  std::vector<char> in_basis_artificial_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  bool warm_ = false;
  double cost_scale_ = 1.0;
  std::size_t iterations_ = 0;
  std::deque<std::string> trace_;
};

}  // namespace wdro::lp
