#include "dualmax/dual_cone.hpp"

#include <cmath>

#include "dualmax/errors.hpp"
#include "dualmax/linprog.hpp"

namespace dualmax {

double DualMeasure::mass() const {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

std::vector<double> DualMeasure::densities(const ScenarioTree& tree) const {
  if (weights.size() != tree.leaves().size())
    raise(Errc::DimensionMismatch, "dual measure length does not match leaf count");
  std::vector<double> out(weights.size());
  for (size_t k = 0; k < weights.size(); ++k)
    out[k] = weights[k] / tree.path_prob(tree.leaves()[k]);
  return out;
}

PolyhedralCone::PolyhedralCone(const ScenarioTree& tree, const TradingCone& cone)
    : leaf_count_(static_cast<int>(tree.leaves().size())) {
  if (!cone.generators.empty() && cone.dim() != tree.asset_count())
    raise(Errc::DimensionMismatch, "cone generators do not match the asset count");

  // Leaves below each child, gathered once per step.
  auto leaves_below = [&](int start) {
    std::vector<int> stack{start}, found;
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      if (tree.is_leaf(id)) {
        found.push_back(tree.leaf_index(id));
        continue;
      }
      for (int c : tree.children(id)) stack.push_back(c);
    }
    return found;
  };

  for (int n : tree.nonterminal()) {
    for (const auto& gen : cone.generators) {
      std::vector<double> row(leaf_count_, 0.0);
      for (int c : tree.children(n)) {
        const auto dS = tree.price_step(c);
        double step = 0.0;
        for (int j = 0; j < tree.asset_count(); ++j) step += gen[j] * dS[j];
        if (step == 0.0) continue;
        for (int li : leaves_below(c)) row[li] = step;
      }
      rows_.push_back(std::move(row));
    }
  }
}

bool PolyhedralCone::contains(const DualMeasure& nu, double tol) const {
  if (static_cast<int>(nu.weights.size()) != leaf_count_)
    raise(Errc::DimensionMismatch, "dual measure length does not match the cone");
  for (double w : nu.weights)
    if (w < -tol) return false;
  for (const auto& row : rows_) {
    double v = 0.0;
    for (int k = 0; k < leaf_count_; ++k) v += row[k] * nu.weights[k];
    if (v > tol) return false;
  }
  return true;
}

bool dual_contains(const PolyhedralCone& dc, const DualMeasure& nu, double tol) {
  return dc.contains(nu, tol);
}

double pairing(const DualMeasure& nu, const ClaimVector& R) {
  if (nu.weights.size() != R.size())
    raise(Errc::DimensionMismatch, "pairing needs matching lengths");
  double v = 0.0;
  for (size_t k = 0; k < R.size(); ++k) v += nu.weights[k] * R[k];
  return v;
}

std::optional<DualMeasure> find_msup_element(const PolyhedralCone& dc, const ScenarioTree& tree) {
  const int L = dc.leaf_count();
  if (static_cast<int>(tree.leaves().size()) != L)
    raise(Errc::DimensionMismatch, "tree does not match the cone");

  // max delta  s.t.  nu in M, nu(Omega) = 1, nu_w >= delta.
  lp::Problem p(lp::Sense::Maximize);
  std::vector<int> nu(L);
  for (int k = 0; k < L; ++k) nu[k] = p.add_variable(0.0);
  const int delta = p.add_variable(1.0);
  for (const auto& row : dc.rows()) {
    std::vector<std::pair<int, double>> terms;
    for (int k = 0; k < L; ++k)
      if (row[k] != 0.0) terms.push_back({nu[k], row[k]});
    if (terms.empty()) continue;
    p.add_constraint(std::move(terms), lp::Rel::LessEq, 0.0);
  }
  {
    std::vector<std::pair<int, double>> terms;
    for (int k = 0; k < L; ++k) terms.push_back({nu[k], 1.0});
    p.add_constraint(std::move(terms), lp::Rel::Eq, 1.0);
  }
  for (int k = 0; k < L; ++k)
    p.add_constraint({{nu[k], 1.0}, {delta, -1.0}}, lp::Rel::GreaterEq, 0.0);

  auto s = p.solve();
  if (!s.optimal() || s.x[delta] <= 1e-10) return std::nullopt;
  DualMeasure out;
  out.weights.assign(s.x.begin(), s.x.begin() + L);
  return out;
}

double endowment_bound(const PolyhedralCone& dc, const ScenarioTree& tree, const ClaimVector& B) {
  const int L = dc.leaf_count();
  if (static_cast<int>(B.size()) != L)
    raise(Errc::DimensionMismatch, "claim length does not match the cone");
  (void)tree;

  lp::Problem p(lp::Sense::Maximize);
  std::vector<int> nu(L);
  for (int k = 0; k < L; ++k) nu[k] = p.add_variable(B[k]);
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
  if (!s.optimal()) raise(Errc::InternalError, "endowment bound program unbounded");
  return s.objective;
}

}  // namespace dualmax
