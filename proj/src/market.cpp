#include "dualmax/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualmax/errors.hpp"
#include "dualmax/linprog.hpp"

namespace dualmax {

ScenarioTree::ScenarioTree(int asset_count, int horizon, std::vector<TreeNode> nodes)
    : d_(asset_count), horizon_(horizon) {
  if (d_ < 1) raise(Errc::DimensionMismatch, "asset count must be at least 1");
  if (horizon_ < 1) raise(Errc::RaggedTree, "horizon must be at least 1");
  const int n = static_cast<int>(nodes.size());
  if (n == 0) raise(Errc::MissingNode, "tree has no nodes");

  nodes_.resize(n);
  std::vector<char> seen(n, 0);
  for (auto& nd : nodes) {
    if (nd.id < 0 || nd.id >= n)
      raise(Errc::MissingNode, "node ids must be dense in 0.." + std::to_string(n - 1));
    if (seen[nd.id]) raise(Errc::MissingNode, "duplicate node id " + std::to_string(nd.id));
    seen[nd.id] = 1;
    if (static_cast<int>(nd.prices.size()) != d_)
      raise(Errc::DimensionMismatch,
            "node " + std::to_string(nd.id) + " has " + std::to_string(nd.prices.size()) +
                " prices, expected " + std::to_string(d_));
    for (double p : nd.prices)
      if (!(p > 0.0) || !std::isfinite(p))
        raise(Errc::NonPositivePrice, "node " + std::to_string(nd.id) + " has price " +
                                          std::to_string(p));
    nodes_[nd.id] = std::move(nd);
  }

  children_.assign(n, {});
  for (const auto& nd : nodes_) {
    if (nd.parent < 0) {
      if (root_ >= 0) raise(Errc::RaggedTree, "more than one root node");
      root_ = nd.id;
      if (nd.t != 0) raise(Errc::RaggedTree, "root node must sit at t = 0");
    } else {
      if (nd.parent >= n) raise(Errc::MissingNode, "parent of node " + std::to_string(nd.id));
      const TreeNode& par = nodes_[nd.parent];
      if (nd.t != par.t + 1)
        raise(Errc::RaggedTree, "node " + std::to_string(nd.id) + " at t=" + std::to_string(nd.t) +
                                    " under parent at t=" + std::to_string(par.t));
      children_[nd.parent].push_back(nd.id);
      if (!(nd.prob > 0.0) || !std::isfinite(nd.prob))
        raise(Errc::ProbabilityNotNormalized,
              "node " + std::to_string(nd.id) + " has nonpositive branch probability");
    }
    if (nd.t > horizon_)
      raise(Errc::RaggedTree, "node " + std::to_string(nd.id) + " lies beyond the horizon");
  }
  if (root_ < 0) raise(Errc::RaggedTree, "no root node");

  path_prob_.assign(n, 0.0);
  leaf_index_.assign(n, -1);
  for (int id = 0; id < n; ++id) std::sort(children_[id].begin(), children_[id].end());

  // Probabilities multiply down the tree; every childless node must sit at
  // the horizon and every interior sibling set must be a probability vector.
  std::vector<int> order{root_};
  path_prob_[root_] = 1.0;
  for (size_t k = 0; k < order.size(); ++k) {
    const int id = order[k];
    if (children_[id].empty()) {
      if (nodes_[id].t != horizon_)
        raise(Errc::RaggedTree,
              "node " + std::to_string(id) + " is a leaf at t=" + std::to_string(nodes_[id].t));
      continue;
    }
    double total = 0.0;
    for (int c : children_[id]) {
      total += nodes_[c].prob;
      path_prob_[c] = path_prob_[id] * nodes_[c].prob;
      order.push_back(c);
    }
    if (std::abs(total - 1.0) > 1e-12)
      raise(Errc::ProbabilityNotNormalized, "children of node " + std::to_string(id) +
                                                " have total probability " + std::to_string(total));
  }
  if (static_cast<int>(order.size()) != n)
    raise(Errc::RaggedTree, "some nodes are unreachable from the root");

  // Keep both partitions in traversal order so parents always precede their
  // descendants; recursions over nonterminal() may rely on that.
  for (int id : order) {
    if (children_[id].empty()) {
      leaf_index_[id] = static_cast<int>(leaves_.size());
      leaves_.push_back(id);
    } else {
      nonterminal_.push_back(id);
    }
  }
}

const TreeNode& ScenarioTree::node(int id) const {
  if (id < 0 || id >= node_count()) raise(Errc::MissingNode, "node " + std::to_string(id));
  return nodes_[id];
}

const std::vector<int>& ScenarioTree::children(int id) const {
  if (id < 0 || id >= node_count()) raise(Errc::MissingNode, "node " + std::to_string(id));
  return children_[id];
}

int ScenarioTree::leaf_index(int id) const {
  if (id < 0 || id >= node_count() || leaf_index_[id] < 0)
    raise(Errc::MissingNode, "node " + std::to_string(id) + " is not a terminal node");
  return leaf_index_[id];
}

double ScenarioTree::path_prob(int id) const {
  if (id < 0 || id >= node_count()) raise(Errc::MissingNode, "node " + std::to_string(id));
  return path_prob_[id];
}

std::vector<double> ScenarioTree::price_step(int child_id) const {
  const TreeNode& c = node(child_id);
  if (c.parent < 0) raise(Errc::MissingNode, "root has no price step");
  const TreeNode& p = node(c.parent);
  std::vector<double> dS(d_);
  for (int j = 0; j < d_; ++j) dS[j] = c.prices[j] - p.prices[j];
  return dS;
}

Strategy Strategy::zeros(const ScenarioTree& tree) {
  Strategy H;
  H.holdings.assign(tree.node_count(), {});
  for (int id : tree.nonterminal()) H.holdings[id].assign(tree.asset_count(), 0.0);
  return H;
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool cone_contains(const TradingCone& cone, const std::vector<double>& v, double tol) {
  const int d = static_cast<int>(v.size());
  for (const auto& g : cone.generators)
    if (static_cast<int>(g.size()) != d)
      raise(Errc::DimensionMismatch, "cone generator dimension mismatch");

  // min sum of deviations |sum_i mu_i k_i - v|, coordinatewise split.
  lp::Problem p(lp::Sense::Minimize);
  std::vector<int> mu;
  mu.reserve(cone.generators.size());
  for (size_t i = 0; i < cone.generators.size(); ++i) mu.push_back(p.add_variable(0.0));
  std::vector<int> dev_pos(d), dev_neg(d);
  for (int j = 0; j < d; ++j) {
    dev_pos[j] = p.add_variable(1.0);
    dev_neg[j] = p.add_variable(1.0);
  }
  for (int j = 0; j < d; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (size_t i = 0; i < cone.generators.size(); ++i)
      if (cone.generators[i][j] != 0.0) terms.push_back({mu[i], cone.generators[i][j]});
    terms.push_back({dev_pos[j], 1.0});
    terms.push_back({dev_neg[j], -1.0});
    p.add_constraint(std::move(terms), lp::Rel::Eq, v[j]);
  }
  auto s = p.solve();
  if (!s.optimal()) raise(Errc::InternalError, "cone membership program did not solve");
  return s.objective <= tol * std::max(1.0, sup_norm(v));
}

std::vector<double> gains_process(const ScenarioTree& tree, const Strategy& H) {
  if (static_cast<int>(H.holdings.size()) != tree.node_count())
    raise(Errc::MissingNode, "strategy must carry one entry per node");
  std::vector<double> g(tree.node_count(), 0.0);
  for (int id : tree.nonterminal()) {
    const auto& h = H.holdings[id];
    if (static_cast<int>(h.size()) != tree.asset_count())
      raise(Errc::DimensionMismatch, "holdings at node " + std::to_string(id));
    for (int c : tree.children(id)) {
      const auto dS = tree.price_step(c);
      double step = 0.0;
      for (int j = 0; j < tree.asset_count(); ++j) step += h[j] * dS[j];
      g[c] = g[id] + step;
    }
  }
  return g;
}

ClaimVector terminal_gains(const ScenarioTree& tree, const Strategy& H) {
  const auto g = gains_process(tree, H);
  ClaimVector out(tree.leaves().size());
  for (size_t k = 0; k < tree.leaves().size(); ++k) out[k] = g[tree.leaves()[k]];
  return out;
}

AdmissibilityReport is_admissible(const ScenarioTree& tree, const TradingCone& cone,
                                  const Strategy& H, double floor) {
  AdmissibilityReport report;
  for (int id : tree.nonterminal()) {
    if (!cone_contains(cone, H.holdings[id])) {
      report.admissible = false;
      report.reasons.push_back("holding at node " + std::to_string(id) + " leaves the cone");
    }
  }
  if (std::isfinite(floor)) {
    const auto g = gains_process(tree, H);
    for (int id = 0; id < tree.node_count(); ++id) {
      if (g[id] < -floor - 1e-12) {
        report.admissible = false;
        report.reasons.push_back("gains at node " + std::to_string(id) + " fall below the floor");
      }
    }
  }
  return report;
}

double expected_value(const ScenarioTree& tree, const ClaimVector& v) {
  if (v.size() != tree.leaves().size())
    raise(Errc::DimensionMismatch, "claim vector length does not match leaf count");
  double e = 0.0;
  for (size_t k = 0; k < tree.leaves().size(); ++k) e += tree.path_prob(tree.leaves()[k]) * v[k];
  return e;
}

}  // namespace dualmax
