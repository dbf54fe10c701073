#pragma once

// Expected-utility maximization over cone-constrained strategies and its
// conjugate minimization over the polyhedral dual cone.  Piecewise-linear
// utilities solve exactly by linear programming; everything else runs a
// damped active-set Newton on the dual paired with a wealth recovery and
// supergradient ascent on the primal, stopping on the certified gap between
// the two sides.

#include <optional>
#include <string>
#include <vector>

#include "dualmax/dual_cone.hpp"
#include "dualmax/market.hpp"
#include "dualmax/utility.hpp"

namespace dualmax {

enum class Backend { Auto, Lp, Subgradient, Convex };

struct SolveOptions {
  Backend backend = Backend::Auto;
  double tol = 1e-6;            // certified-gap stopping threshold
  long max_iterations = 100000; // ascent cap; Newton and line searches are short
  bool force = false;           // run even when the assumption gate fails
};

// One entry per hypothesis the theory rests on, checked up front.
struct AssumptionReport {
  InadaReport inada;                     // slopes unbounded at 0+, vanishing at +inf
  ElasticityReport elasticity;
  bool elasticity_finite = false;
  std::optional<DualMeasure> msup;       // strictly positive normalized dual element
  bool dual_value_finite = false;        // E[conjugate(density)] finite at that element
  std::optional<double> endowment_bound; // sup of psi_nu(B) over the normalized slice
  double wealth = 0.0;
  bool wealth_ok = false;                // wealth exceeds the bound by > 1e-10

  bool all_pass() const;
  std::vector<std::string> failures() const;
};

AssumptionReport check_assumptions(const ScenarioTree& tree, const PolyhedralCone& dc,
                                   const PiecewiseUtility& U, const ClaimVector& B, double x);

struct Residuals {
  double budget = 0.0;            // |psi_nu(X*) - x nu(Omega)|
  double subdiff_violation = 0.0; // worst distance of X*-B from the maximizer interval
  double singular_pairing = 0.0;  // identically zero: no singular part at finite Omega
};

struct PrimalSolution {
  double u_value = 0.0;
  Strategy H_star;
  ClaimVector X_star;
  long iterations = 0;
  std::string backend;
};

struct DualSolution {
  double w_value = 0.0;
  DualMeasure nu_star;
  long iterations = 0;
  std::string backend;
};

struct SolveReport {
  double x = 0.0;
  double u_value = 0.0;
  double w_value = 0.0;
  double gap = 0.0;  // |u_value - w_value|
  double y_star = 0.0;  // nu_star total mass
  ClaimVector X_star;
  Strategy H_star;
  DualMeasure nu_star;
  Residuals residuals;
  std::string backend;
  long iterations = 0;
  AssumptionReport assumptions;
};

// max E[U(x + terminal gains - B)] over cone-feasible strategies.
PrimalSolution solve_primal(const ScenarioTree& tree, const TradingCone& cone,
                            const PiecewiseUtility& U, const ClaimVector& B, double x,
                            const SolveOptions& options = {});

// min E[conjugate(density)] - psi_nu(B) + x nu(Omega) over the dual cone.
DualSolution solve_dual(const ScenarioTree& tree, const PolyhedralCone& dc,
                        const PiecewiseUtility& U, const ClaimVector& B, double x,
                        const SolveOptions& options = {});

// Both problems plus the optimality residuals, sharing one dual solve.
SolveReport solve(const ScenarioTree& tree, const TradingCone& cone, const PiecewiseUtility& U,
                  const ClaimVector& B, double x, const SolveOptions& options = {});

struct RelationCheck {
  std::string name;
  double magnitude = 0.0;
  bool pass = false;
};

struct RelationCertificate {
  std::vector<RelationCheck> checks;
  double tol = 0.0;
  bool all_pass() const;
};

// Recomputes, from the report alone, the optimality conditions that pin the
// optimizer pair: zero singular pairing, the budget identity
// psi_nu(X*) = x nu(Omega), membership of X*-B in the maximizer interval of
// U(.) - density * . at every charged leaf, and the value gap.
RelationCertificate verify_relations(const ScenarioTree& tree, const SolveReport& report,
                                     const PiecewiseUtility& U, const ClaimVector& B, double tol);

// Raises RelationViolated naming the worst failed check.
void require_relations(const RelationCertificate& certificate);

}  // namespace dualmax
