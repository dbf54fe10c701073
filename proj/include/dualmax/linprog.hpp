#pragma once

// Dense two-phase simplex for the small linear programs used throughout the
// library: cone membership, polar-cone searches, super-replication, and the
// piecewise-linear solve backends.  Pivoting is deterministic (Dantzig with a
// permanent switch to Bland's rule after a degenerate stall), so repeated
// solves of the same program return the same vertex.

#include <utility>
#include <vector>

namespace dualmax::lp {

enum class Sense { Minimize, Maximize };
enum class Rel { LessEq, GreaterEq, Eq };
enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  // Row multipliers oriented so that sum_i row_duals[i] * rhs[i] equals the
  // optimal objective in the problem's own sense.  For Maximize, LessEq rows
  // carry nonnegative duals; for Minimize, GreaterEq rows do.
  std::vector<double> row_duals;
  long iterations = 0;
  bool optimal() const { return status == Status::Optimal; }
};

class Problem {
 public:
  explicit Problem(Sense sense) : sense_(sense) {}

  int add_variable(double objective_coef);       // constrained to >= 0
  int add_free_variable(double objective_coef);  // unrestricted sign
  void add_constraint(std::vector<std::pair<int, double>> terms, Rel rel, double rhs);

  int variable_count() const { return static_cast<int>(is_free_.size()); }
  int constraint_count() const { return static_cast<int>(rows_.size()); }

  Solution solve() const;

 private:
  struct Row {
    std::vector<std::pair<int, double>> terms;
    Rel rel;
    double rhs;
  };

  Sense sense_;
  std::vector<double> obj_;
  std::vector<char> is_free_;
  std::vector<Row> rows_;
};

}  // namespace dualmax::lp
