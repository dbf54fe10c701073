#pragma once

// Brute-force reference evaluations on tiny instances: exhaustive grids over
// strategies, dual weights, and conjugate arguments.  Deliberately naive and
// independent of the solvers, so a disagreement localizes the bug.

#include <vector>

#include "dualmax/dual_cone.hpp"
#include "dualmax/market.hpp"
#include "dualmax/utility.hpp"

namespace dualmax {

struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int count = 33;
};

// One axis per decision dimension; a single axis is reused for all of them.
// Each of the two refinement passes shrinks the search box by `refine` around
// the incumbent and re-sweeps at the same resolution.
struct GridSpec {
  std::vector<GridAxis> axes;
  double refine = 4.0;
};

struct BruteResult {
  double value = 0.0;
  double error_bound = 0.0;      // worst objective variation to an adjacent grid point
  std::vector<double> point;     // incumbent coordinates
  long evaluations = 0;          // feasible grid points visited
};

// Exhaustive maximization of E[U(x + gains - B)] over the strategy grid,
// keeping only points whose holdings lie in the cone at every nonterminal
// node.  Coordinates run nonterminal-major, asset-minor.
BruteResult brute_primal(const ScenarioTree& tree, const TradingCone& cone,
                         const PiecewiseUtility& U, const ClaimVector& B, double x,
                         const GridSpec& grid);

// Exhaustive minimization of E[conjugate(density)] - psi_nu(B) + x nu(Omega)
// over the weight grid, keeping only points inside the dual cone.
BruteResult brute_dual(const ScenarioTree& tree, const PolyhedralCone& dc,
                       const PiecewiseUtility& U, const ClaimVector& B, double x,
                       const GridSpec& grid);

struct ConjugateProbe {
  double value = 0.0;
  double lo = 0.0;  // hull of the grid points within 1e-9 of the maximum
  double hi = 0.0;
};

// Grid maximization of U(z) - zy over log-spaced z in [1e-9, 1e9]; the first
// axis count sets the resolution and the plateau hull approximates the
// maximizer interval.
ConjugateProbe brute_conjugate(const PiecewiseUtility& U, double y, const GridSpec& grid = {});

}  // namespace dualmax
