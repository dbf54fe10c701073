#include "dualmax/superrep.hpp"

#include <algorithm>
#include <cmath>

#include "dualmax/errors.hpp"
#include "dualmax/linprog.hpp"

namespace dualmax {

namespace {

// The polar rows double as the columns of the terminal gains map: row (n, i)
// holds, per leaf, the one-step gain of generator i held at node n along the
// path to that leaf.  A conic coefficient vector mu over those rows therefore
// produces terminal gains (G mu)(w) = sum_r mu_r rows[r][w] and a strategy
// H(n) = sum_i mu_(n,i) k_i.
Strategy strategy_from_coefficients(const ScenarioTree& tree, const TradingCone& cone,
                                    const std::vector<double>& mu) {
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

void check_claim_length(const ScenarioTree& tree, const ClaimVector& R) {
  if (R.size() != tree.leaves().size())
    raise(Errc::DimensionMismatch, "claim length does not match the number of terminal nodes");
}

}  // namespace

SuperRepFeasibility superreplicable_primal(const ScenarioTree& tree, const TradingCone& cone,
                                           const ClaimVector& R, double tol) {
  check_claim_length(tree, R);
  const PolyhedralCone dc = build_dual_cone(tree, cone);
  const auto& G = dc.rows();
  const int L = dc.leaf_count();
  const int ncol = static_cast<int>(G.size());

  // Minimal total shortfall of a cone-financed covering of R from zero capital.
  lp::Problem p(lp::Sense::Minimize);
  std::vector<int> mu(ncol), slack(L);
  for (int r = 0; r < ncol; ++r) mu[r] = p.add_variable(0.0);
  for (int k = 0; k < L; ++k) slack[k] = p.add_variable(1.0);
  for (int k = 0; k < L; ++k) {
    std::vector<std::pair<int, double>> terms{{slack[k], 1.0}};
    for (int r = 0; r < ncol; ++r)
      if (G[r][k] != 0.0) terms.push_back({mu[r], G[r][k]});
    p.add_constraint(std::move(terms), lp::Rel::GreaterEq, R[k]);
  }
  auto s = p.solve();
  if (!s.optimal()) raise(Errc::InternalError, "shortfall program failed to solve");

  SuperRepFeasibility out;
  out.shortfall = std::max(0.0, s.objective);
  out.feasible = out.shortfall <= tol * std::max(1.0, sup_norm(R));
  out.witness = strategy_from_coefficients(tree, cone, std::vector<double>(s.x.begin(), s.x.begin() + ncol));
  return out;
}

bool superreplicable_dual(const PolyhedralCone& dc, const ScenarioTree& tree, const ClaimVector& R,
                          double tol) {
  check_claim_length(tree, R);
  const int L = dc.leaf_count();

  lp::Problem p(lp::Sense::Maximize);
  std::vector<int> nu(L);
  for (int k = 0; k < L; ++k) nu[k] = p.add_variable(R[k]);
  for (const auto& row : dc.rows()) {
    std::vector<std::pair<int, double>> terms;
    for (int k = 0; k < L; ++k)
      if (row[k] != 0.0) terms.push_back({nu[k], row[k]});
    if (terms.empty()) continue;
    p.add_constraint(std::move(terms), lp::Rel::LessEq, 0.0);
  }
  std::vector<std::pair<int, double>> mass;
  for (int k = 0; k < L; ++k) mass.push_back({nu[k], 1.0});
  p.add_constraint(std::move(mass), lp::Rel::Eq, 1.0);

  auto s = p.solve();
  if (s.status == lp::Status::Infeasible)
    raise(Errc::InfeasibleDualDomain, "no normalized element in the dual cone");
  if (!s.optimal()) raise(Errc::InternalError, "polar pricing program unbounded");
  return s.objective <= tol;
}

PriceResult superrep_price(const PolyhedralCone& dc, const ScenarioTree& tree,
                           const TradingCone& cone, const ClaimVector& R) {
  check_claim_length(tree, R);
  const auto& G = dc.rows();
  const int L = dc.leaf_count();
  const int ncol = static_cast<int>(G.size());

  // min x  s.t.  x + (G mu)(w) >= R(w), mu >= 0.  The multipliers of the
  // covering rows form exactly the normalized polar slice, so the optimal x
  // equals sup of psi_nu(R) over that slice.
  lp::Problem p(lp::Sense::Minimize);
  const int x = p.add_free_variable(1.0);
  std::vector<int> mu(ncol);
  for (int r = 0; r < ncol; ++r) mu[r] = p.add_variable(0.0);
  for (int k = 0; k < L; ++k) {
    std::vector<std::pair<int, double>> terms{{x, 1.0}};
    for (int r = 0; r < ncol; ++r)
      if (G[r][k] != 0.0) terms.push_back({mu[r], G[r][k]});
    p.add_constraint(std::move(terms), lp::Rel::GreaterEq, R[k]);
  }
  auto s = p.solve();
  if (s.status == lp::Status::Unbounded)
    raise(Errc::InfeasibleDualDomain,
          "price unbounded below: the normalized dual slice is empty");
  if (!s.optimal()) raise(Errc::InternalError, "pricing program failed to solve");

  PriceResult out;
  out.price = s.objective;
  out.witness =
      strategy_from_coefficients(tree, cone, std::vector<double>(s.x.begin() + 1, s.x.begin() + 1 + ncol));
  return out;
}

DecompositionResult decompose_claim(const PolyhedralCone& dc, const ScenarioTree& tree,
                                    const TradingCone& cone, const ClaimVector& R) {
  check_claim_length(tree, R);
  (void)dc;
  const int m = static_cast<int>(cone.generators.size());

  DecompositionResult out;
  out.value.assign(tree.node_count(), 0.0);
  out.consumption.assign(tree.node_count(), 0.0);
  out.hedge = Strategy::zeros(tree);
  for (int k = 0; k < static_cast<int>(R.size()); ++k) out.value[tree.leaves()[k]] = R[k];

  // Backward sweep: at each node the cheapest one-step cone covering of the
  // child values gives V(n) and the hedge; the per-child slack becomes the
  // consumption increment.
  const auto& inner = tree.nonterminal();
  for (auto it = inner.rbegin(); it != inner.rend(); ++it) {
    const int n = *it;
    const auto& kids = tree.children(n);

    lp::Problem p(lp::Sense::Minimize);
    const int beta = p.add_free_variable(1.0);
    std::vector<int> eta(m);
    for (int i = 0; i < m; ++i) eta[i] = p.add_variable(0.0);
    for (int c : kids) {
      const auto dS = tree.price_step(c);
      std::vector<std::pair<int, double>> terms{{beta, 1.0}};
      for (int i = 0; i < m; ++i) {
        double step = 0.0;
        for (int j = 0; j < tree.asset_count(); ++j) step += cone.generators[i][j] * dS[j];
        if (step != 0.0) terms.push_back({eta[i], step});
      }
      p.add_constraint(std::move(terms), lp::Rel::GreaterEq, out.value[c]);
    }
    auto s = p.solve();
    if (!s.optimal())
      raise(Errc::NodeDecompositionFailure,
            "one-step covering program has no optimum at node " + std::to_string(n));

    out.value[n] = s.objective;
    auto& h = out.hedge.holdings[n];
    for (int i = 0; i < m; ++i) {
      if (s.x[1 + i] == 0.0) continue;
      for (int j = 0; j < tree.asset_count(); ++j) h[j] += s.x[1 + i] * cone.generators[i][j];
    }
  }

  // Accumulate consumption along paths from the covering slack.
  for (int id : tree.nonterminal()) {
    for (int c : tree.children(id)) {
      const auto dS = tree.price_step(c);
      double gain = 0.0;
      for (int j = 0; j < tree.asset_count(); ++j) gain += out.hedge.holdings[id][j] * dS[j];
      double inc = out.value[id] + gain - out.value[c];
      if (inc < -1e-7)
        raise(Errc::NodeDecompositionFailure,
              "covering slack turned negative below node " + std::to_string(id));
      out.consumption[c] = out.consumption[id] + std::max(0.0, inc);
    }
  }
  return out;
}

}  // namespace dualmax
