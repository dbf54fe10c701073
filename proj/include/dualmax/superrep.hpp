#pragma once

// Super-replication on scenario trees: primal feasibility by linear
// programming, the dual polar test over the normalized slice of M, the
// super-replication price with its hedge witness, and the constructive
// optional decomposition V = V0 + gains(H) - C.

#include <vector>

#include "dualmax/dual_cone.hpp"
#include "dualmax/market.hpp"

namespace dualmax {

struct SuperRepFeasibility {
  bool feasible = false;
  Strategy witness;       // meaningful when feasible
  double shortfall = 0;   // residual of the covering program
};

// Whether some cone-feasible H has (H.S)_T >= R at every leaf (zero initial
// capital); the witness is the minimizing-shortfall strategy.
SuperRepFeasibility superreplicable_primal(const ScenarioTree& tree, const TradingCone& cone,
                                           const ClaimVector& R, double tol = 1e-8);

// Lemma-style polar test: max psi_nu(R) over normalized nu in M is <= tol.
bool superreplicable_dual(const PolyhedralCone& dc, const ScenarioTree& tree, const ClaimVector& R,
                          double tol = 1e-8);

struct PriceResult {
  double price = 0.0;
  Strategy witness;  // hedge with price + (witness.S)_T >= R
};

// inf { v : R - v super-replicable } = sup over normalized M of psi_nu(R).
PriceResult superrep_price(const PolyhedralCone& dc, const ScenarioTree& tree,
                           const TradingCone& cone, const ClaimVector& R);

struct DecompositionResult {
  std::vector<double> value;       // V per node; V = value[root] + gains - consumption
  Strategy hedge;                  // H per nonterminal node, in the cone
  std::vector<double> consumption; // cumulative C per node, C(root) = 0, nondecreasing on paths
};

// Backward recursion: V(leaf) = R, V(n) = max of the one-step reweighted
// child values over the node's local normalized supermartingale weights; the
// hedge comes from the multipliers of that program and the consumption from
// its slack.
DecompositionResult decompose_claim(const PolyhedralCone& dc, const ScenarioTree& tree,
                                    const TradingCone& cone, const ClaimVector& R);

}  // namespace dualmax
