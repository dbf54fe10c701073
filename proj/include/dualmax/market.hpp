#pragma once

// Finite multi-period market on a scenario tree: the filtration is the tree,
// prices live on nodes, trading strategies assign a holdings vector to every
// nonterminal node, and trades are constrained to a polyhedral cone.

#include <limits>
#include <string>
#include <vector>

namespace dualmax {

struct TreeNode {
  int id = 0;
  int parent = -1;  // -1 marks the root
  int t = 0;
  double prob = 1.0;  // conditional branch probability given the parent
  std::vector<double> prices;
};

class ScenarioTree {
 public:
  // Validates the structural invariants: dense ids, a single root at t = 0,
  // child times incrementing by one, every leaf at depth `horizon`, strictly
  // positive prices of uniform dimension, and conditional probabilities that
  // are positive and sum to one across each sibling set.
  ScenarioTree(int asset_count, int horizon, std::vector<TreeNode> nodes);

  int asset_count() const { return d_; }
  int horizon() const { return horizon_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int root() const { return root_; }

  const TreeNode& node(int id) const;
  const std::vector<int>& children(int id) const;
  bool is_leaf(int id) const { return children(id).empty(); }
  // Both partitions are in root-first traversal order, so iterating
  // nonterminal() forwards (backwards) visits parents before (after) children.
  const std::vector<int>& leaves() const { return leaves_; }
  const std::vector<int>& nonterminal() const { return nonterminal_; }
  int leaf_index(int id) const;       // position of a terminal node in leaves()
  double path_prob(int id) const;     // probability of reaching the node
  std::vector<double> price_step(int child_id) const;  // S(child) - S(parent)

 private:
  int d_;
  int horizon_;
  int root_ = -1;
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<int>> children_;
  std::vector<int> leaves_;
  std::vector<int> nonterminal_;
  std::vector<int> leaf_index_;
  std::vector<double> path_prob_;
};

// Cone of admissible trades, K = { sum_i mu_i * generators[i] : mu_i >= 0 }.
struct TradingCone {
  std::vector<std::vector<double>> generators;
  int dim() const { return generators.empty() ? 0 : static_cast<int>(generators[0].size()); }
};

// Holdings per node id; entries for terminal nodes stay empty.
struct Strategy {
  std::vector<std::vector<double>> holdings;
  static Strategy zeros(const ScenarioTree& tree);
};

// Payoffs on terminal nodes, ordered as ScenarioTree::leaves().
using ClaimVector = std::vector<double>;

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<std::string> reasons;
};

// Whether v lies in the cone, solving a small feasibility program.  The
// defect is measured relative to max(1, ||v||_inf).
bool cone_contains(const TradingCone& cone, const std::vector<double>& v, double tol = 1e-9);

// Accumulated trading gains at every node: g(root) = 0 and
// g(child) = g(parent) + H(parent) . (S(child) - S(parent)).
std::vector<double> gains_process(const ScenarioTree& tree, const Strategy& H);

// Gains restricted to terminal nodes, in leaves() order.
ClaimVector terminal_gains(const ScenarioTree& tree, const Strategy& H);

// Checks that every holding lies in the cone and, when floor is finite, that
// the gains process never drops below -floor.
AdmissibilityReport is_admissible(const ScenarioTree& tree, const TradingCone& cone,
                                  const Strategy& H,
                                  double floor = std::numeric_limits<double>::infinity());

double expected_value(const ScenarioTree& tree, const ClaimVector& v);
double sup_norm(const std::vector<double>& v);

}  // namespace dualmax
