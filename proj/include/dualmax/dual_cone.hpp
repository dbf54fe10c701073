#pragma once

// Finite polyhedral description of the dual domain: nonnegative terminal
// weights nu paired against claims via psi_nu(R) = sum nu(w) R(w), and the
// cone M of weights that price every admissible gains claim nonpositively.
// One inequality row per (nonterminal node, cone generator) pair captures the
// supermartingale property of elementary strategies.

#include <optional>
#include <vector>

#include "dualmax/market.hpp"

namespace dualmax {

struct DualMeasure {
  std::vector<double> weights;  // one per terminal node, leaves() order
  double mass() const;
  std::vector<double> densities(const ScenarioTree& tree) const;  // weights / path prob
};

class PolyhedralCone {
 public:
  PolyhedralCone(const ScenarioTree& tree, const TradingCone& cone);

  int leaf_count() const { return leaf_count_; }
  // Coefficient vectors over terminal nodes; nu belongs to the cone iff
  // nu >= 0 and every row pairs with it to <= 0.
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  bool contains(const DualMeasure& nu, double tol = 1e-9) const;

 private:
  int leaf_count_;
  std::vector<std::vector<double>> rows_;
};

inline PolyhedralCone build_dual_cone(const ScenarioTree& tree, const TradingCone& cone) {
  return PolyhedralCone(tree, cone);
}

bool dual_contains(const PolyhedralCone& dc, const DualMeasure& nu, double tol = 1e-9);

// psi_nu(R): the pairing of a dual weight vector with a claim.
double pairing(const DualMeasure& nu, const ClaimVector& R);

// A strictly positive unit-mass element of M with maximal minimum weight, or
// nullopt when the maximized minimum weight falls below 1e-10 (no strictly
// positive normalized element exists, so the model is rejected).
std::optional<DualMeasure> find_msup_element(const PolyhedralCone& dc, const ScenarioTree& tree);

// sup of psi_nu(B) over normalized elements of M (the closure of the strictly
// positive slice, where the sup is the same).
double endowment_bound(const PolyhedralCone& dc, const ScenarioTree& tree, const ClaimVector& B);

}  // namespace dualmax
