#pragma once

// Small hand-checked markets shared across the test suite.

#include <vector>

#include "dualmax/market.hpp"
#include "dualmax/utility.hpp"

namespace fixtures {

// One-period binomial: S0 = 1, doubling or halving with equal probability.
inline dualmax::ScenarioTree bin1_tree() {
  std::vector<dualmax::TreeNode> nodes{
      {0, -1, 0, 1.0, {1.0}},
      {1, 0, 1, 0.5, {2.0}},
      {2, 0, 1, 0.5, {0.5}},
  };
  return dualmax::ScenarioTree(1, 1, std::move(nodes));
}

// One-period binomial with a milder up-move, used with a long-only cone.
inline dualmax::ScenarioTree bin2_tree() {
  std::vector<dualmax::TreeNode> nodes{
      {0, -1, 0, 1.0, {1.0}},
      {1, 0, 1, 0.5, {1.1}},
      {2, 0, 1, 0.5, {0.5}},
  };
  return dualmax::ScenarioTree(1, 1, std::move(nodes));
}

// Two periods of the doubling/halving binomial; leaves are ids 3..6 with
// prices 4, 1, 1, 0.25.
inline dualmax::ScenarioTree two_period_tree() {
  std::vector<dualmax::TreeNode> nodes{
      {0, -1, 0, 1.0, {1.0}},  {1, 0, 1, 0.5, {2.0}},  {2, 0, 1, 0.5, {0.5}},
      {3, 1, 2, 0.5, {4.0}},   {4, 1, 2, 0.5, {1.0}},  {5, 2, 2, 0.5, {1.0}},
      {6, 2, 2, 0.5, {0.25}},
  };
  return dualmax::ScenarioTree(1, 2, std::move(nodes));
}

// Unconstrained trading in one asset: generators +1 and -1 span the line.
inline dualmax::TradingCone line_cone() { return {{{1.0}, {-1.0}}}; }

// Long-only trading in one asset.
inline dualmax::TradingCone long_only_cone() { return {{{1.0}}}; }

// Digital call paying 1 on the up branch of a one-period binomial.
inline dualmax::ClaimVector bin_call() { return {1.0, 0.0}; }

// min(2*sqrt(x), 1 + sqrt(x)): strictly concave pieces with a kink at x = 1.
inline dualmax::PiecewiseUtility kink_utility() {
  dualmax::UtilityPiece head{dualmax::PieceKind::Power, 0.0, 2.0, 0.5, 0, 0, 0};
  dualmax::UtilityPiece tail{dualmax::PieceKind::Power, 1.0, 1.0, 0.5, 0, 0, 0};
  return dualmax::PiecewiseUtility::from_pieces({head, tail});
}

// min(x, 1): piecewise linear and bounded, so the slope at zero is finite.
inline dualmax::PiecewiseUtility capped_linear() {
  dualmax::UtilityPiece head{dualmax::PieceKind::Linear, 0.0, 1.0, 0.5, 1.0, 0.0, 0};
  dualmax::UtilityPiece cap{dualmax::PieceKind::Linear, 1.0, 1.0, 0.5, 0.0, 0.0, 0};
  return dualmax::PiecewiseUtility::from_pieces({head, cap});
}

}  // namespace fixtures
