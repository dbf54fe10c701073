#include "dualmax/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualmax/errors.hpp"

namespace dualmax::lp {

namespace {

constexpr double kZeroTol = 1e-9;    // reduced-cost / feasibility threshold
constexpr double kPivotTol = 1e-11;  // reject pivots smaller than this
constexpr long kMaxPivots = 500000;

// Working tableau for the standard-form program  min c'z  s.t.  Az = b, z >= 0
// with b >= 0.  T holds B^{-1}A side by side with B^{-1}b in the last column.
struct Tableau {
  int m = 0;
  int n = 0;                 // columns of A (structural + slack + artificial)
  std::vector<double> t;     // m rows, n+1 columns
  std::vector<int> basis;    // basis column per row
  std::vector<char> banned;  // columns barred from entering (artificials in phase 2)
  long pivots = 0;

  double& at(int i, int j) { return t[static_cast<size_t>(i) * (n + 1) + j]; }
  double at(int i, int j) const { return t[static_cast<size_t>(i) * (n + 1) + j]; }
  double& rhs(int i) { return at(i, n); }
  double rhs(int i) const { return at(i, n); }

  void pivot(int pr, int pc) {
    const double piv = at(pr, pc);
    const double inv = 1.0 / piv;
    for (int j = 0; j <= n; ++j) at(pr, j) *= inv;
    at(pr, pc) = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == pr) continue;
      const double f = at(i, pc);
      if (f == 0.0) continue;
      for (int j = 0; j <= n; ++j) at(i, j) -= f * at(pr, j);
      at(i, pc) = 0.0;
    }
    basis[pr] = pc;
    ++pivots;
  }

  // Runs the simplex on the given cost vector.  Returns false when the
  // objective is unbounded below.  `cost` has length n.
  bool run(const std::vector<double>& cost) {
    std::vector<double> rc(n);
    auto reduced_costs = [&] {
      for (int j = 0; j < n; ++j) rc[j] = cost[j];
      for (int i = 0; i < m; ++i) {
        const double cb = cost[basis[i]];
        if (cb == 0.0) continue;
        for (int j = 0; j < n; ++j) rc[j] -= cb * at(i, j);
      }
    };
    reduced_costs();

    bool bland = false;
    int stall = 0;
    double last_obj = std::numeric_limits<double>::infinity();
    while (true) {
      if (pivots > kMaxPivots) raise(Errc::InternalError, "simplex pivot limit exceeded");
      int pc = -1;
      if (bland) {
        for (int j = 0; j < n; ++j)
          if (!banned[j] && rc[j] < -kZeroTol) { pc = j; break; }
      } else {
        double best = -kZeroTol;
        for (int j = 0; j < n; ++j)
          if (!banned[j] && rc[j] < best) { best = rc[j]; pc = j; }
      }
      if (pc < 0) return true;  // optimal

      int pr = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = at(i, pc);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (pr < 0 || basis[i] < basis[pr]))) {
          best_ratio = ratio;
          pr = i;
        }
      }
      if (pr < 0) return false;  // unbounded

      pivot(pr, pc);

      // Incremental reduced-cost update from the normalized pivot row.
      const double entering_rc = rc[pc];
      for (int j = 0; j < n; ++j) rc[j] -= entering_rc * at(pr, j);
      rc[pc] = 0.0;

      double obj = 0.0;
      for (int i = 0; i < m; ++i) obj += cost[basis[i]] * rhs(i);
      if (!bland) {
        if (obj > last_obj - 1e-13) {
          if (++stall > 64) { bland = true; reduced_costs(); }
        } else {
          stall = 0;
        }
      }
      last_obj = obj;
    }
  }
};

// Solves B^T y = c_B by Gaussian elimination with partial pivoting.
std::vector<double> solve_transposed(const std::vector<std::vector<double>>& bcols,
                                     std::vector<double> cb) {
  const int m = static_cast<int>(cb.size());
  std::vector<std::vector<double>> a(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a[i][j] = bcols[i][j];  // row i of B^T = column i of B
  for (int k = 0; k < m; ++k) {
    int piv = k;
    for (int i = k + 1; i < m; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (std::abs(a[piv][k]) < 1e-13) {
      // Singular basis matrices should not occur; degenerate zero pivots get a
      // tiny regularization so dual extraction still returns something usable.
      a[piv][k] = (a[piv][k] < 0 ? -1e-13 : 1e-13);
    }
    std::swap(a[k], a[piv]);
    std::swap(cb[k], cb[piv]);
    for (int i = k + 1; i < m; ++i) {
      const double f = a[i][k] / a[k][k];
      if (f == 0.0) continue;
      for (int j = k; j < m; ++j) a[i][j] -= f * a[k][j];
      cb[i] -= f * cb[k];
    }
  }
  std::vector<double> y(m);
  for (int k = m - 1; k >= 0; --k) {
    double s = cb[k];
    for (int j = k + 1; j < m; ++j) s -= a[k][j] * y[j];
    y[k] = s / a[k][k];
  }
  return y;
}

}  // namespace

int Problem::add_variable(double objective_coef) {
  obj_.push_back(objective_coef);
  is_free_.push_back(0);
  return static_cast<int>(obj_.size()) - 1;
}

int Problem::add_free_variable(double objective_coef) {
  obj_.push_back(objective_coef);
  is_free_.push_back(1);
  return static_cast<int>(obj_.size()) - 1;
}

void Problem::add_constraint(std::vector<std::pair<int, double>> terms, Rel rel, double rhs) {
  for (const auto& [idx, coef] : terms) {
    (void)coef;
    if (idx < 0 || idx >= variable_count())
      raise(Errc::InternalError, "constraint references unknown variable");
  }
  rows_.push_back(Row{std::move(terms), rel, rhs});
}

Solution Problem::solve() const {
  const int nvar = variable_count();
  const int m = constraint_count();

  // Column layout: structural columns first (free variables split into a
  // positive and a negative part), then slacks, then artificials.
  std::vector<int> col_of(nvar), neg_col_of(nvar, -1);
  int ncols = 0;
  for (int j = 0; j < nvar; ++j) {
    col_of[j] = ncols++;
    if (is_free_[j]) neg_col_of[j] = ncols++;
  }
  const int slack_base = ncols;
  int nslack = 0;
  for (const auto& row : rows_)
    if (row.rel != Rel::Eq) ++nslack;
  ncols += nslack;
  const int art_base = ncols;
  ncols += m;

  Tableau tb;
  tb.m = m;
  tb.n = ncols;
  tb.t.assign(static_cast<size_t>(m) * (ncols + 1), 0.0);
  tb.basis.resize(m);
  tb.banned.assign(ncols, 0);

  const bool minimize = (sense_ == Sense::Minimize);
  std::vector<double> sign(m, 1.0);
  {
    int srow = 0;
    for (int i = 0; i < m; ++i) {
      const Row& row = rows_[i];
      for (const auto& [idx, coef] : row.terms) {
        tb.at(i, col_of[idx]) += coef;
        if (neg_col_of[idx] >= 0) tb.at(i, neg_col_of[idx]) -= coef;
      }
      if (row.rel != Rel::Eq) {
        tb.at(i, slack_base + srow) = (row.rel == Rel::LessEq) ? 1.0 : -1.0;
        ++srow;
      }
      tb.rhs(i) = row.rhs;
      if (tb.rhs(i) < 0) {
        sign[i] = -1.0;
        for (int j = 0; j <= ncols; ++j) tb.t[static_cast<size_t>(i) * (ncols + 1) + j] *= -1.0;
      }
      tb.at(i, art_base + i) = 1.0;
      tb.basis[i] = art_base + i;
    }
  }

  Solution sol;

  // Phase 1: drive artificials to zero.
  {
    std::vector<double> cost(ncols, 0.0);
    for (int i = 0; i < m; ++i) cost[art_base + i] = 1.0;
    if (!tb.run(cost)) raise(Errc::InternalError, "phase-1 simplex reported unbounded");
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (tb.basis[i] >= art_base) infeas += tb.rhs(i);
    if (infeas > kZeroTol * 10) {
      sol.status = Status::Infeasible;
      sol.iterations = tb.pivots;
      return sol;
    }
    // Pivot basic artificials out where possible; rows where we cannot are
    // redundant and keep a zero-level artificial in the basis.
    for (int i = 0; i < m; ++i) {
      if (tb.basis[i] < art_base) continue;
      int pc = -1;
      for (int j = 0; j < art_base; ++j)
        if (std::abs(tb.at(i, j)) > 1e-8) { pc = j; break; }
      if (pc >= 0) tb.pivot(i, pc);
    }
    for (int j = art_base; j < ncols; ++j) tb.banned[j] = 1;
  }

  // Phase 2: optimize the real objective (always as a minimization).
  std::vector<double> cost(ncols, 0.0);
  for (int j = 0; j < nvar; ++j) {
    const double c = minimize ? obj_[j] : -obj_[j];
    cost[col_of[j]] = c;
    if (neg_col_of[j] >= 0) cost[neg_col_of[j]] = -c;
  }
  if (!tb.run(cost)) {
    sol.status = Status::Unbounded;
    sol.iterations = tb.pivots;
    return sol;
  }

  sol.status = Status::Optimal;
  sol.iterations = tb.pivots;
  sol.x.assign(nvar, 0.0);
  std::vector<double> colval(ncols, 0.0);
  for (int i = 0; i < m; ++i) colval[tb.basis[i]] = tb.rhs(i);
  for (int j = 0; j < nvar; ++j) {
    sol.x[j] = colval[col_of[j]];
    if (neg_col_of[j] >= 0) sol.x[j] -= colval[neg_col_of[j]];
  }
  double obj = 0.0;
  for (int j = 0; j < nvar; ++j) obj += obj_[j] * sol.x[j];
  sol.objective = obj;

  // Dual multipliers from the final basis: solve B^T y = c_B against the
  // original standard-form columns, then undo row flips and the sense flip.
  if (m > 0) {
    std::vector<std::vector<double>> bcols(m, std::vector<double>(m, 0.0));
    std::vector<double> cb(m, 0.0);
    for (int i = 0; i < m; ++i) {
      const int bc = tb.basis[i];
      cb[i] = cost[bc];
      if (bc >= art_base) {
        // Artificials were added after the row flips, so their column is +e_k.
        bcols[i][bc - art_base] = 1.0;
        continue;
      }
      // Reconstruct the column in the same (flipped) coordinates the tableau
      // was built in.
      std::vector<double> col(m, 0.0);
      if (bc < slack_base) {
        for (int r = 0; r < m; ++r) {
          double v = 0.0;
          for (const auto& [idx, coef] : rows_[r].terms) {
            if (col_of[idx] == bc) v += coef;
            if (neg_col_of[idx] == bc) v -= coef;
          }
          col[r] = v * sign[r];
        }
      } else {
        int srow = 0;
        for (int r = 0; r < m; ++r) {
          if (rows_[r].rel == Rel::Eq) continue;
          if (slack_base + srow == bc) {
            col[r] = (rows_[r].rel == Rel::LessEq ? 1.0 : -1.0) * sign[r];
            break;
          }
          ++srow;
        }
      }
      bcols[i] = std::move(col);
    }
    std::vector<double> y = solve_transposed(bcols, cb);
    sol.row_duals.resize(m);
    for (int i = 0; i < m; ++i) {
      double d = y[i] * sign[i];
      if (!minimize) d = -d;
      sol.row_duals[i] = d;
    }
  }
  return sol;
}

}  // namespace dualmax::lp
