#include "dualmax/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dualmax/errors.hpp"
#include "dualmax/linprog.hpp"

namespace dualmax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_gap(double gap) {
  std::ostringstream os;
  os.precision(3);
  os << gap;
  return os.str();
}

// Shared per-solve view: leaf probabilities and the gains map, whose columns
// are exactly the inequality rows of the polyhedral dual cone.
struct Instance {
  const ScenarioTree& tree;
  const PolyhedralCone& dc;
  std::vector<double> P;  // path probability per leaf, leaves() order
  int L = 0;

  Instance(const ScenarioTree& t, const PolyhedralCone& d) : tree(t), dc(d) {
    L = static_cast<int>(tree.leaves().size());
    P.resize(L);
    for (int k = 0; k < L; ++k) P[k] = tree.path_prob(tree.leaves()[k]);
  }

  const std::vector<std::vector<double>>& G() const { return dc.rows(); }
  int cols() const { return static_cast<int>(dc.rows().size()); }

  std::vector<double> terminal_gains_of(const std::vector<double>& mu) const {
    std::vector<double> g(L, 0.0);
    for (int r = 0; r < cols(); ++r) {
      if (mu[r] == 0.0) continue;
      const auto& row = G()[r];
      for (int k = 0; k < L; ++k) g[k] += mu[r] * row[k];
    }
    return g;
  }

  Strategy strategy_of(const TradingCone& cone, const std::vector<double>& mu) const {
    Strategy H = Strategy::zeros(tree);
    const int m = static_cast<int>(cone.generators.size());
    const auto& inner = tree.nonterminal();
    for (size_t a = 0; a < inner.size(); ++a) {
      auto& h = H.holdings[inner[a]];
      for (int i = 0; i < m; ++i) {
        const double c = mu[a * m + i];
        if (c == 0.0) continue;
        for (int j = 0; j < tree.asset_count(); ++j) h[j] += c * cone.generators[i][j];
      }
    }
    return H;
  }
};

double expected_utility(const Instance& in, const PiecewiseUtility& U, const ClaimVector& B,
                        double x, const std::vector<double>& gains) {
  double total = 0.0;
  for (int k = 0; k < in.L; ++k) {
    const double v = U.eval(x + gains[k] - B[k]);
    if (v == -kInf) return -kInf;
    total += in.P[k] * v;
  }
  return total;
}

// Extended-value dual objective; +inf off the conjugate's domain, and a zero
// weight contributes P * sup U (infinite exactly when U is unbounded).
double dual_objective(const Instance& in, const PiecewiseUtility& U, const ClaimVector& B,
                      double x, const std::vector<double>& nu) {
  double total = 0.0;
  for (int k = 0; k < in.L; ++k) {
    if (nu[k] < 0.0) return kInf;
    const double term =
        nu[k] == 0.0 ? U.sup_value() : U.conjugate(nu[k] / in.P[k]);
    if (term == kInf) return kInf;
    total += in.P[k] * term + nu[k] * (x - B[k]);
  }
  return total;
}

// Distance of v = X - B from the maximizer interval of U(.) - density * .,
// the subdifferential relation written through conjugate_argmax.  A zero
// weight only requires v above the smallest maximizer of U itself.
double maximizer_distance(const PiecewiseUtility& U, double v, double weight, double prob) {
  if (weight < 0.0) return kInf;
  if (weight == 0.0) {
    const double floor = U.smallest_maximizer();
    if (!std::isfinite(floor)) return std::isfinite(v) ? kInf : 0.0;
    return std::max(0.0, floor - v);
  }
  const double dens = weight / prob;
  const double tail = U.tail_slope();
  if (tail == 0.0 || dens > tail * (1.0 + 1e-12)) {
    // The interval jumps as the density crosses a piece slope, and vertex
    // solutions land exactly on slopes; bracket with a relative hair so a
    // density resting on a slope admits the whole piece.
    const auto I = U.conjugate_argmax(dens * (1.0 + 1e-8));
    const auto J = U.conjugate_argmax(dens * (1.0 - 1e-8));
    return std::max({0.0, I.lo - v, v - J.hi});
  }
  // Density at (or numerically on) the terminal slope: maximizers extend to
  // +inf, only the lower edge of the plateau binds.
  const auto I = U.conjugate_argmax(tail * (1.0 + 1e-9));
  return std::max(0.0, I.lo - v);
}

Residuals compute_residuals(const Instance& in, const PiecewiseUtility& U, const ClaimVector& B,
                            double x, const ClaimVector& X, const DualMeasure& nu) {
  Residuals res;
  res.budget = std::abs(pairing(nu, X) - x * nu.mass());
  for (int k = 0; k < in.L; ++k)
    res.subdiff_violation = std::max(
        res.subdiff_violation, maximizer_distance(U, X[k] - B[k], nu.weights[k], in.P[k]));
  res.singular_pairing = 0.0;
  return res;
}

// ---------------------------------------------------------------------------
// piecewise-linear backends: exact epigraph linear programs

struct PlPiece {
  double knot;
  double slope;
  double value;
};

std::vector<PlPiece> pl_pieces(const PiecewiseUtility& U) {
  std::vector<PlPiece> out;
  for (const auto& pc : U.pieces()) out.push_back({pc.knot, pc.slope, U.eval(pc.knot)});
  return out;
}

PrimalSolution primal_lp(const Instance& in, const TradingCone& cone, const PiecewiseUtility& U,
                         const ClaimVector& B, double x) {
  const auto pieces = pl_pieces(U);
  lp::Problem p(lp::Sense::Maximize);
  std::vector<int> mu(in.cols());
  for (int r = 0; r < in.cols(); ++r) mu[r] = p.add_variable(0.0);
  std::vector<int> z(in.L);
  for (int k = 0; k < in.L; ++k) z[k] = p.add_free_variable(in.P[k]);

  for (int k = 0; k < in.L; ++k) {
    // Terminal wealth stays in the utility domain.
    std::vector<std::pair<int, double>> dom;
    for (int r = 0; r < in.cols(); ++r)
      if (in.G()[r][k] != 0.0) dom.push_back({mu[r], in.G()[r][k]});
    p.add_constraint(std::move(dom), lp::Rel::GreaterEq, B[k] - x);
    // One supporting line per piece dominates the concave value.
    for (const auto& pc : pieces) {
      std::vector<std::pair<int, double>> terms{{z[k], 1.0}};
      for (int r = 0; r < in.cols(); ++r)
        if (in.G()[r][k] != 0.0) terms.push_back({mu[r], -pc.slope * in.G()[r][k]});
      p.add_constraint(std::move(terms), lp::Rel::LessEq,
                       pc.value + pc.slope * (x - B[k] - pc.knot));
    }
  }

  auto s = p.solve();
  if (s.status == lp::Status::Infeasible)
    raise(Errc::WealthBelowEndowmentBound,
          "no admissible strategy keeps terminal wealth in the utility domain");
  if (!s.optimal()) raise(Errc::NoConvergence, "value program is unbounded above");

  PrimalSolution out;
  out.backend = "lp";
  out.iterations = s.iterations;
  std::vector<double> muv(s.x.begin(), s.x.begin() + in.cols());
  out.H_star = in.strategy_of(cone, muv);
  const auto g = in.terminal_gains_of(muv);
  out.X_star.resize(in.L);
  out.u_value = 0.0;
  for (int k = 0; k < in.L; ++k) {
    double X = x + g[k];
    // The covering rows hold only to solver tolerance; snap rounding-level
    // shortfalls so the utility evaluates inside its domain.
    if (X < B[k] && X - B[k] > -1e-9 * (1.0 + std::abs(x) + std::abs(B[k]))) X = B[k];
    out.X_star[k] = X;
    out.u_value += in.P[k] * U.eval(X - B[k]);
  }
  return out;
}

DualSolution dual_lp(const Instance& in, const PiecewiseUtility& U, const ClaimVector& B,
                     double x) {
  const auto pieces = pl_pieces(U);
  const double tail = U.tail_slope();

  lp::Problem p(lp::Sense::Minimize);
  std::vector<int> nu(in.L), theta(in.L);
  for (int k = 0; k < in.L; ++k) nu[k] = p.add_variable(x - B[k]);
  for (int k = 0; k < in.L; ++k) theta[k] = p.add_free_variable(1.0);

  for (const auto& row : in.G()) {
    std::vector<std::pair<int, double>> terms;
    for (int k = 0; k < in.L; ++k)
      if (row[k] != 0.0) terms.push_back({nu[k], row[k]});
    if (terms.empty()) continue;
    p.add_constraint(std::move(terms), lp::Rel::LessEq, 0.0);
  }
  for (int k = 0; k < in.L; ++k) {
    // theta_k >= P U~(nu_k / P) written through the knot supports:
    // U~(y) = max_j { value_j - knot_j y } on its domain y >= tail slope.
    for (const auto& pc : pieces)
      p.add_constraint({{theta[k], 1.0}, {nu[k], pc.knot}}, lp::Rel::GreaterEq,
                       in.P[k] * pc.value);
    if (tail > 0.0)
      p.add_constraint({{nu[k], 1.0}}, lp::Rel::GreaterEq, in.P[k] * tail);
  }

  auto s = p.solve();
  if (s.status == lp::Status::Infeasible)
    raise(Errc::InfeasibleDualDomain, "conjugate program has no feasible weights");
  if (!s.optimal()) raise(Errc::DualUnboundedBelow, "conjugate program is unbounded");

  DualSolution out;
  out.backend = "lp";
  out.iterations = s.iterations;
  out.w_value = s.objective;
  out.nu_star.weights.assign(s.x.begin(), s.x.begin() + in.L);
  return out;
}

// ---------------------------------------------------------------------------
// general backend, dual side: anchor-ray bracketing plus an active-set Newton
// on the weights, every candidate evaluated exactly.

bool solve_dense(std::vector<std::vector<double>>& M, std::vector<double>& b) {
  const int n = static_cast<int>(M.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
    if (std::abs(M[piv][col]) < 1e-13) return false;
    std::swap(M[piv], M[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col || M[r][col] == 0.0) continue;
      const double f = M[r][col] / M[col][col];
      for (int c = col; c < n; ++c) M[r][c] -= f * M[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = 0; r < n; ++r) b[r] /= M[r][r];
  return true;
}

struct NewtonResult {
  std::vector<double> nu;
  double value = kInf;
  long iterations = 0;
};

// Largest relative row violation; the iterate belongs to the cone only when
// this is at rounding level.
double cone_violation(const std::vector<std::vector<double>>& rows, const std::vector<double>& nu) {
  double viol = 0.0;
  for (const auto& row : rows) {
    double scale = 1.0, v = 0.0;
    for (size_t k = 0; k < nu.size(); ++k) {
      v += row[k] * nu[k];
      scale = std::max(scale, std::abs(row[k]) * nu[k]);
    }
    viol = std::max(viol, v / scale);
  }
  return viol;
}

NewtonResult newton_polish(const Instance& in, const PiecewiseUtility& U, const ClaimVector& B,
                           double x, std::vector<double> nu, double value, long max_passes) {
  const double tail = U.tail_slope();
  const auto& rows = in.G();
  const int nrows = static_cast<int>(rows.size());

  // Only a feasible iterate certifies the other problem, so best-so-far
  // tracking starts once the cone is actually reached; the start can sit
  // slightly outside it through vertex rounding in the anchor.
  NewtonResult best{nu, kInf, 0};
  if (cone_violation(rows, nu) <= 1e-11) best.value = value;

  for (long iter = 0; iter < max_passes; ++iter) {
    ++best.iterations;

    // Gradient and (regularized) diagonal curvature of the smooth part.
    std::vector<double> g(in.L), h(in.L);
    bool domain_ok = true;
    for (int k = 0; k < in.L; ++k) {
      const double y = nu[k] / in.P[k];
      if (y <= 0.0 || (tail > 0.0 && y <= tail)) {
        domain_ok = false;
        break;
      }
      const auto I = U.conjugate_argmax(y);
      g[k] = x - B[k] - I.lo;
      const auto curv = U.conjugate_curvature(y);
      double hk = curv ? *curv : 1e-4 * (1.0 + std::abs(g[k]));
      h[k] = std::max(hk, 1e-10) / in.P[k];
    }
    if (!domain_ok) break;

    double viol = 0.0;
    std::vector<double> resid(nrows, 0.0);
    std::vector<char> binding(nrows, 0);
    for (int r = 0; r < nrows; ++r) {
      double scale = 1.0, v = 0.0;
      for (int k = 0; k < in.L; ++k) {
        v += rows[r][k] * nu[k];
        scale = std::max(scale, std::abs(rows[r][k]) * nu[k]);
      }
      resid[r] = v;
      binding[r] = v >= -1e-10 * scale;
      viol = std::max(viol, v / scale);
    }
    const bool restoring = viol > 1e-11;

    // Working-set step: solve on the binding rows, and while the step
    // vanishes with some multiplier negative, release the worst offender and
    // re-solve.  Strict descent between iterations rules out cycling.
    std::vector<char> dropped(nrows, 0);
    std::vector<double> step;
    std::vector<int> active;
    double gTd = 0.0;
    bool have_step = false, converged = false;
    for (int attempt = 0; attempt <= nrows; ++attempt) {
      // A linearly independent subset of the working set keeps the saddle
      // system nonsingular under duplicate or combined generators; skipped
      // dependents ride along on the same face.
      active.clear();
      std::vector<std::vector<double>> basis;
      for (int r = 0; r < nrows; ++r) {
        if (!binding[r] || dropped[r]) continue;
        std::vector<double> dir(rows[r]);
        double norm0 = 0.0;
        for (double e : dir) norm0 = std::max(norm0, std::abs(e));
        for (const auto& b : basis) {
          double dot = 0.0, bb = 0.0;
          for (int k = 0; k < in.L; ++k) dot += dir[k] * b[k], bb += b[k] * b[k];
          for (int k = 0; k < in.L; ++k) dir[k] -= (dot / bb) * b[k];
        }
        double norm1 = 0.0;
        for (double e : dir) norm1 = std::max(norm1, std::abs(e));
        if (norm1 <= 1e-10 * std::max(1.0, norm0)) continue;
        basis.push_back(std::move(dir));
        active.push_back(r);
      }

      const int na = static_cast<int>(active.size());
      const int dim = in.L + na;
      std::vector<std::vector<double>> M(dim, std::vector<double>(dim, 0.0));
      std::vector<double> rhs(dim, 0.0);
      for (int k = 0; k < in.L; ++k) {
        M[k][k] = h[k];
        rhs[k] = -g[k];
      }
      for (int a = 0; a < na; ++a) {
        for (int k = 0; k < in.L; ++k) {
          M[in.L + a][k] = rows[active[a]][k];
          M[k][in.L + a] = rows[active[a]][k];
        }
        rhs[in.L + a] = -resid[active[a]];
      }
      if (!solve_dense(M, rhs)) break;

      step.assign(rhs.begin(), rhs.begin() + in.L);
      gTd = 0.0;
      for (int k = 0; k < in.L; ++k) gTd += g[k] * step[k];

      // A usable step must promise a decrease visibly above rounding; a
      // face-constrained minimum only looks converged until the multipliers
      // are checked.  While restoring feasibility any step that repairs the
      // violated rows is usable.
      if (restoring || gTd < -1e-15 * (1.0 + std::abs(value))) {
        have_step = true;
        break;
      }
      int drop = -1;
      double worst = -1e-9 * (1.0 + std::abs(value));
      for (int a = 0; a < na; ++a)
        if (rhs[in.L + a] < worst) worst = rhs[in.L + a], drop = active[a];
      if (drop < 0) {
        converged = true;  // no descent on the face, all multipliers nonnegative
        break;
      }
      dropped[drop] = 1;
    }
    if (converged || !have_step) break;

    // Stay strictly inside the cone and the conjugate's domain.  Rows already
    // on the face belong to the saddle solve, not the ratio test; capping on
    // their rounding-level slack would freeze the step.
    double alpha = 1.0;
    for (int r = 0; r < nrows; ++r) {
      if (binding[r]) continue;
      double rd = 0.0;
      for (int k = 0; k < in.L; ++k) rd += rows[r][k] * step[k];
      if (rd > 1e-14) alpha = std::min(alpha, 0.995 * (-resid[r]) / rd);
    }
    for (int k = 0; k < in.L; ++k) {
      const double floor = in.P[k] * tail;
      if (step[k] < 0.0 && nu[k] > floor)
        alpha = std::min(alpha, 0.995 * (nu[k] - floor) / (-step[k]));
    }

    bool improved = false;
    for (int half = 0; half < 55 && alpha > 0.0; ++half, alpha *= 0.5) {
      std::vector<double> trial(in.L);
      for (int k = 0; k < in.L; ++k) trial[k] = nu[k] + alpha * step[k];
      const double tviol = cone_violation(rows, trial);
      const double fv = dual_objective(in, U, B, x, trial);
      if (restoring) {
        // Feasibility first: accept any finite step that shrinks the worst
        // violation in proportion to the step taken, whatever it does to the
        // objective.  The repaired rows are linear, so a full step clears them.
        if (fv < kInf && tviol <= std::max((1.0 - 0.5 * alpha) * viol, 1e-12)) {
          nu = std::move(trial);
          value = fv;
          improved = true;
          break;
        }
        continue;
      }
      // Reject any trial that leaves the cone, and require strict decrease:
      // a float no-op must not count as progress.
      if (tviol > 1e-11) continue;
      if (fv <= value + 1e-4 * alpha * gTd && fv < value) {
        nu = std::move(trial);
        value = fv;
        improved = true;
        break;
      }
    }
    if (!improved) break;
    if (!restoring || cone_violation(rows, nu) <= 1e-11) {
      if (value < best.value) {
        best.value = value;
        best.nu = nu;
      }
    }
  }
  return best;
}

DualSolution dual_general(const Instance& in, const PiecewiseUtility& U, const ClaimVector& B,
                          double x, const std::optional<DualMeasure>& anchor_hint,
                          const SolveOptions& opts) {
  auto anchor = anchor_hint ? anchor_hint : find_msup_element(in.dc, in.tree);
  if (!anchor)
    raise(Errc::InfeasibleDualDomain,
          "no strictly positive normalized dual element to anchor the search");

  // Bracket the best scaling of the anchor; the objective is convex in the
  // log-scale with an infinite prefix at most on the left.
  auto ray = [&](double lr) {
    std::vector<double> nu(in.L);
    const double r = std::exp(lr);
    for (int k = 0; k < in.L; ++k) nu[k] = r * anchor->weights[k];
    return nu;
  };
  long evals = 0;
  auto phi = [&](double lr) {
    ++evals;
    return dual_objective(in, U, B, x, ray(lr));
  };
  // The iteration cap also bounds the dual's fixed budget, so a deliberately
  // starved run reports its honestly positive gap instead of stalling.
  const long golden_iters = std::min<long>(100, opts.max_iterations);
  const long newton_passes = std::min<long>(80, opts.max_iterations);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(1e-8), b = std::log(1e8);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = phi(c), fd = phi(d);
  for (long it = 0; it < golden_iters; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = phi(d);
    }
  }
  const double lr = fc < fd ? c : d;
  std::vector<double> nu0 = ray(lr);
  const double f0 = dual_objective(in, U, B, x, nu0);
  if (f0 == kInf)
    raise(Errc::AssumptionFailure, "no finite dual value found along the anchor ray");

  auto polished = newton_polish(in, U, B, x, std::move(nu0), f0, newton_passes);
  if (!std::isfinite(polished.value))
    raise(Errc::NoConvergence, "the dual iterate never reached the feasible cone");

  DualSolution out;
  out.backend = "convex";
  out.iterations = evals + polished.iterations;
  out.w_value = polished.value;
  out.nu_star.weights = std::move(polished.nu);
  return out;
}

// ---------------------------------------------------------------------------
// general backend, primal side: wealth recovery from the dual weights, then
// certified supergradient ascent on the cone coefficients when needed.

struct TargetBox {
  double lo = 0.0;
  double hi = kInf;
};

std::vector<TargetBox> wealth_targets(const Instance& in, const PiecewiseUtility& U,
                                      const ClaimVector& B, const std::vector<double>& nu) {
  const double tail = U.tail_slope();
  std::vector<TargetBox> box(in.L);
  for (int k = 0; k < in.L; ++k) {
    TargetBox tb;
    if (nu[k] <= 0.0) {
      const double floor = U.smallest_maximizer();
      tb.lo = std::isfinite(floor) ? floor : 1e12;
    } else {
      const double dens = nu[k] / in.P[k];
      if (tail == 0.0 || dens > tail * (1.0 + 1e-12)) {
        const auto I = U.conjugate_argmax(dens);
        tb.lo = I.lo;
        tb.hi = I.hi;
      } else {
        tb.lo = U.conjugate_argmax(tail * (1.0 + 1e-9)).lo;
      }
    }
    box[k].lo = B[k] + tb.lo;
    box[k].hi = std::isfinite(tb.hi) ? B[k] + tb.hi : kInf;
  }
  return box;
}

// Two stages: first the least-deviation fit of terminal wealth into the
// target boxes, then, among those fits, the smallest budget residual
// |<nu, X - x>| = |sum_r mu_r <nu, G_r>|.  Returns the cone coefficients.
std::vector<double> recover_coefficients(const Instance& in, const std::vector<TargetBox>& box,
                                         double x, const std::vector<double>& nu, long& lp_iters) {
  auto build = [&](lp::Problem& p, double dev_cost, std::vector<int>& mu) {
    std::vector<int> dev;
    for (int r = 0; r < in.cols(); ++r) mu.push_back(p.add_variable(0.0));
    for (int k = 0; k < 2 * in.L; ++k) dev.push_back(p.add_variable(dev_cost));
    for (int k = 0; k < in.L; ++k) {
      std::vector<std::pair<int, double>> terms{{dev[2 * k], 1.0}, {dev[2 * k + 1], -1.0}};
      for (int r = 0; r < in.cols(); ++r)
        if (in.G()[r][k] != 0.0) terms.push_back({mu[r], in.G()[r][k]});
      auto upper = terms;
      p.add_constraint(std::move(terms), lp::Rel::GreaterEq, box[k].lo - x);
      if (std::isfinite(box[k].hi))
        p.add_constraint(std::move(upper), lp::Rel::LessEq, box[k].hi - x);
    }
    return dev;
  };

  lp::Problem p1(lp::Sense::Minimize);
  std::vector<int> mu1;
  build(p1, 1.0, mu1);
  auto s1 = p1.solve();
  if (!s1.optimal()) raise(Errc::InternalError, "wealth recovery program failed");
  lp_iters += s1.iterations;
  const double least_dev = std::max(0.0, s1.objective);

  // Budget coefficients <nu, G_r> per cone column.
  std::vector<double> c(in.cols(), 0.0);
  for (int r = 0; r < in.cols(); ++r)
    for (int k = 0; k < in.L; ++k) c[r] += nu[k] * in.G()[r][k];

  lp::Problem p2(lp::Sense::Minimize);
  std::vector<int> mu2;
  auto dev2 = build(p2, 0.0, mu2);
  const int t = p2.add_variable(1.0);
  {
    std::vector<std::pair<int, double>> cap;
    for (int dv : dev2) cap.push_back({dv, 1.0});
    p2.add_constraint(std::move(cap), lp::Rel::LessEq, least_dev + 1e-11 * (1.0 + least_dev));
  }
  std::vector<std::pair<int, double>> above{{t, 1.0}}, below{{t, 1.0}};
  for (int r = 0; r < in.cols(); ++r) {
    if (c[r] == 0.0) continue;
    above.push_back({mu2[r], -c[r]});
    below.push_back({mu2[r], c[r]});
  }
  p2.add_constraint(std::move(above), lp::Rel::GreaterEq, 0.0);
  p2.add_constraint(std::move(below), lp::Rel::GreaterEq, 0.0);
  auto s2 = p2.solve();
  if (s2.optimal()) {
    lp_iters += s2.iterations;
    return std::vector<double>(s2.x.begin(), s2.x.begin() + in.cols());
  }
  return std::vector<double>(s1.x.begin(), s1.x.begin() + in.cols());
}

// Strictly feasible fallback: maximize the worst slack of x + gains - B.
std::vector<double> interior_coefficients(const Instance& in, const ClaimVector& B, double x) {
  lp::Problem p(lp::Sense::Maximize);
  std::vector<int> mu(in.cols());
  for (int r = 0; r < in.cols(); ++r) mu[r] = p.add_variable(0.0);
  const int delta = p.add_free_variable(1.0);
  for (int k = 0; k < in.L; ++k) {
    std::vector<std::pair<int, double>> terms{{delta, -1.0}};
    for (int r = 0; r < in.cols(); ++r)
      if (in.G()[r][k] != 0.0) terms.push_back({mu[r], in.G()[r][k]});
    p.add_constraint(std::move(terms), lp::Rel::GreaterEq, B[k] - x);
  }
  // Keep the program bounded; only strict positivity of the slack matters.
  p.add_constraint({{delta, 1.0}}, lp::Rel::LessEq, 1.0 + std::abs(x) + sup_norm(B));
  auto s = p.solve();
  if (!s.optimal() || s.x[in.cols()] <= 0.0)
    raise(Errc::WealthBelowEndowmentBound,
          "no strategy keeps terminal wealth strictly inside the utility domain");
  return std::vector<double>(s.x.begin(), s.x.begin() + in.cols());
}

}  // namespace

// ---------------------------------------------------------------------------

bool AssumptionReport::all_pass() const {
  return inada.passes && elasticity_finite && msup.has_value() && dual_value_finite && wealth_ok;
}

std::vector<std::string> AssumptionReport::failures() const {
  std::vector<std::string> out;
  if (!inada.passes) out.push_back("marginal utility must climb to +inf at 0 and vanish at +inf");
  if (!elasticity_finite) out.push_back("asymptotic elasticity of the conjugate is not finite");
  if (!msup.has_value()) out.push_back("no strictly positive normalized dual element exists");
  else if (!dual_value_finite)
    out.push_back("conjugate expectation is infinite at the found dual element");
  if (!wealth_ok) {
    std::ostringstream os;
    os.precision(17);
    os << "initial wealth " << wealth << " does not exceed the endowment bound";
    if (endowment_bound) os << " " << *endowment_bound;
    out.push_back(os.str());
  }
  return out;
}

AssumptionReport check_assumptions(const ScenarioTree& tree, const PolyhedralCone& dc,
                                   const PiecewiseUtility& U, const ClaimVector& B, double x) {
  if (B.size() != tree.leaves().size())
    raise(Errc::DimensionMismatch, "endowment length does not match the number of leaves");
  AssumptionReport rep;
  rep.wealth = x;
  rep.inada = U.inada();
  rep.elasticity = asymptotic_elasticity(U);
  rep.elasticity_finite = std::isfinite(rep.elasticity.value);
  rep.msup = find_msup_element(dc, tree);
  if (rep.msup) {
    bool finite = true;
    for (size_t k = 0; k < rep.msup->weights.size(); ++k) {
      const double dens = rep.msup->weights[k] / tree.path_prob(tree.leaves()[k]);
      if (!std::isfinite(U.conjugate(dens))) {
        finite = false;
        break;
      }
    }
    rep.dual_value_finite = finite;
  }
  try {
    rep.endowment_bound = endowment_bound(dc, tree, B);
  } catch (const Error&) {
    rep.endowment_bound.reset();
  }
  rep.wealth_ok = rep.endowment_bound && x > *rep.endowment_bound + 1e-10;
  return rep;
}

namespace {

void gate_or_raise(const AssumptionReport& gate, const SolveOptions& opts) {
  if (opts.force || gate.all_pass()) return;
  const bool only_wealth = gate.inada.passes && gate.elasticity_finite && gate.msup.has_value() &&
                           gate.dual_value_finite && !gate.wealth_ok;
  const auto fails = gate.failures();
  std::string joined;
  for (const auto& f : fails) joined += (joined.empty() ? "" : "; ") + f;
  if (only_wealth) raise(Errc::WealthBelowEndowmentBound, joined);
  raise(Errc::AssumptionFailure, joined);
}

Backend resolve_backend(Backend requested, const PiecewiseUtility& U) {
  if (requested == Backend::Auto)
    return U.piecewise_linear() ? Backend::Lp : Backend::Subgradient;
  if (requested == Backend::Lp && !U.piecewise_linear())
    raise(Errc::AssumptionFailure, "the lp backend requires a piecewise-linear utility");
  return requested;
}

PrimalSolution primal_general(const Instance& in, const TradingCone& cone,
                              const PiecewiseUtility& U, const ClaimVector& B, double x,
                              const SolveOptions& opts, const DualSolution& dual) {
  PrimalSolution out;
  out.backend = "subgradient";

  const auto box = wealth_targets(in, U, B, dual.nu_star.weights);
  long lp_iters = 0;
  std::vector<double> mu = recover_coefficients(in, box, x, dual.nu_star.weights, lp_iters);
  out.iterations = lp_iters;

  auto gains = in.terminal_gains_of(mu);
  double f = expected_utility(in, U, B, x, gains);
  if (f == -kInf) {
    mu = interior_coefficients(in, B, x);
    gains = in.terminal_gains_of(mu);
    f = expected_utility(in, U, B, x, gains);
  }
  std::vector<double> best_mu = mu;
  double f_best = f;

  // Certified-gap supergradient ascent with target steps; the dual value is
  // an upper bound, so the gap never lies.
  const int cols = in.cols();
  for (long iter = 0; iter < opts.max_iterations; ++iter) {
    if (dual.w_value - f_best <= opts.tol * 0.9) break;
    ++out.iterations;

    std::vector<double> grad(cols, 0.0);
    double gnorm2 = 0.0;
    if (f == -kInf) {
      // Stepped outside the domain: pull back halfway to the best point.
      for (int r = 0; r < cols; ++r) mu[r] = 0.5 * (mu[r] + best_mu[r]);
      gains = in.terminal_gains_of(mu);
      f = expected_utility(in, U, B, x, gains);
      continue;
    }
    for (int k = 0; k < in.L; ++k) {
      const double v = x + gains[k] - B[k];
      double q;
      if (v <= 0.0) q = U.head_slope();
      else {
        const auto sd = U.subdiff(v);
        q = 0.5 * (sd.lo + std::min(sd.hi, 1e100));
      }
      if (!std::isfinite(q)) q = 1e100;
      const double w = in.P[k] * q;
      for (int r = 0; r < cols; ++r) grad[r] += w * in.G()[r][k];
    }
    for (int r = 0; r < cols; ++r) gnorm2 += grad[r] * grad[r];
    if (gnorm2 <= 1e-300) break;

    double t = (dual.w_value - f) / gnorm2;
    bool moved = false;
    for (int half = 0; half < 60; ++half, t *= 0.5) {
      std::vector<double> trial(cols);
      for (int r = 0; r < cols; ++r) trial[r] = std::max(0.0, mu[r] + t * grad[r]);
      auto tg = in.terminal_gains_of(trial);
      const double fv = expected_utility(in, U, B, x, tg);
      if (fv == -kInf) continue;
      mu = std::move(trial);
      gains = std::move(tg);
      f = fv;
      moved = true;
      break;
    }
    if (!moved) break;
    if (f > f_best) {
      f_best = f;
      best_mu = mu;
    }
  }

  const double gap = dual.w_value - f_best;
  if (gap > opts.tol)
    raise(Errc::NoConvergence, "certified gap " + format_gap(gap) + " above tolerance after " +
                                   std::to_string(out.iterations) + " iterations");

  out.u_value = f_best;
  out.H_star = in.strategy_of(cone, best_mu);
  const auto bg = in.terminal_gains_of(best_mu);
  out.X_star.resize(in.L);
  for (int k = 0; k < in.L; ++k) out.X_star[k] = x + bg[k];
  return out;
}

}  // namespace

PrimalSolution solve_primal(const ScenarioTree& tree, const TradingCone& cone,
                            const PiecewiseUtility& U, const ClaimVector& B, double x,
                            const SolveOptions& options) {
  if (!(options.tol > 0.0)) raise(Errc::OutsideDomain, "tolerance must be positive");
  if (options.max_iterations < 1) raise(Errc::OutsideDomain, "iteration cap must be positive");
  const PolyhedralCone dc = build_dual_cone(tree, cone);
  const Instance in(tree, dc);
  auto gate = check_assumptions(tree, dc, U, B, x);
  gate_or_raise(gate, options);
  const Backend be = resolve_backend(options.backend, U);
  if (be == Backend::Lp) return primal_lp(in, cone, U, B, x);
  const auto dual = dual_general(in, U, B, x, gate.msup, options);
  return primal_general(in, cone, U, B, x, options, dual);
}

DualSolution solve_dual(const ScenarioTree& tree, const PolyhedralCone& dc,
                        const PiecewiseUtility& U, const ClaimVector& B, double x,
                        const SolveOptions& options) {
  if (!(options.tol > 0.0)) raise(Errc::OutsideDomain, "tolerance must be positive");
  if (options.max_iterations < 1) raise(Errc::OutsideDomain, "iteration cap must be positive");
  const Instance in(tree, dc);
  auto gate = check_assumptions(tree, dc, U, B, x);
  gate_or_raise(gate, options);
  const Backend be = resolve_backend(options.backend, U);
  if (be == Backend::Lp) return dual_lp(in, U, B, x);
  return dual_general(in, U, B, x, gate.msup, options);
}

SolveReport solve(const ScenarioTree& tree, const TradingCone& cone, const PiecewiseUtility& U,
                  const ClaimVector& B, double x, const SolveOptions& options) {
  if (!(options.tol > 0.0)) raise(Errc::OutsideDomain, "tolerance must be positive");
  if (options.max_iterations < 1) raise(Errc::OutsideDomain, "iteration cap must be positive");
  const PolyhedralCone dc = build_dual_cone(tree, cone);
  const Instance in(tree, dc);

  SolveReport rep;
  rep.x = x;
  rep.assumptions = check_assumptions(tree, dc, U, B, x);
  gate_or_raise(rep.assumptions, options);

  const Backend be = resolve_backend(options.backend, U);
  DualSolution dual;
  PrimalSolution primal;
  if (be == Backend::Lp) {
    dual = dual_lp(in, U, B, x);
    primal = primal_lp(in, cone, U, B, x);
    rep.backend = "lp";
  } else {
    dual = dual_general(in, U, B, x, rep.assumptions.msup, options);
    primal = primal_general(in, cone, U, B, x, options, dual);
    rep.backend = be == Backend::Convex ? "convex" : "subgradient";
  }

  rep.u_value = primal.u_value;
  rep.w_value = dual.w_value;
  rep.gap = std::abs(rep.u_value - rep.w_value);
  rep.X_star = primal.X_star;
  rep.H_star = primal.H_star;
  rep.nu_star = dual.nu_star;
  rep.y_star = dual.nu_star.mass();
  rep.iterations = primal.iterations + dual.iterations;
  rep.residuals = compute_residuals(in, U, B, x, rep.X_star, rep.nu_star);
  return rep;
}

bool RelationCertificate::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

RelationCertificate verify_relations(const ScenarioTree& tree, const SolveReport& report,
                                     const PiecewiseUtility& U, const ClaimVector& B, double tol) {
  if (!(tol > 0.0)) raise(Errc::OutsideDomain, "tolerance must be positive");
  const int L = static_cast<int>(tree.leaves().size());
  if (static_cast<int>(report.X_star.size()) != L ||
      static_cast<int>(report.nu_star.weights.size()) != L || static_cast<int>(B.size()) != L)
    raise(Errc::DimensionMismatch, "report does not match the tree");

  RelationCertificate cert;
  cert.tol = tol;

  const double singular = report.residuals.singular_pairing;
  cert.checks.push_back({"singular_pairing", std::abs(singular), singular == 0.0});

  const double budget = std::abs(pairing(report.nu_star, report.X_star) -
                                 report.x * report.nu_star.mass());
  cert.checks.push_back({"budget", budget, budget <= tol});

  double worst = 0.0;
  for (int k = 0; k < L; ++k)
    worst = std::max(worst,
                     maximizer_distance(U, report.X_star[k] - B[k], report.nu_star.weights[k],
                                        tree.path_prob(tree.leaves()[k])));
  cert.checks.push_back({"subdifferential", worst, worst <= tol});

  const double gap = std::abs(report.u_value - report.w_value);
  cert.checks.push_back({"gap", gap, gap <= tol});
  return cert;
}

void require_relations(const RelationCertificate& certificate) {
  const RelationCheck* worst = nullptr;
  for (const auto& c : certificate.checks) {
    if (c.pass) continue;
    if (!worst || c.magnitude > worst->magnitude) worst = &c;
  }
  if (worst)
    raise(Errc::RelationViolated, worst->name + " off by " + format_gap(worst->magnitude));
}

}  // namespace dualmax
