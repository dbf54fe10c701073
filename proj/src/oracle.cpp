#include "dualmax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "dualmax/errors.hpp"

namespace dualmax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<GridAxis> expand_axes(const GridSpec& grid, int dims) {
  if (grid.axes.empty())
    raise(Errc::OutsideDomain, "the grid needs at least one axis");
  if (!(grid.refine > 1.0) || !std::isfinite(grid.refine))
    raise(Errc::OutsideDomain, "the grid refinement factor must exceed 1");
  std::vector<GridAxis> axes;
  if (static_cast<int>(grid.axes.size()) == dims)
    axes = grid.axes;
  else if (grid.axes.size() == 1)
    axes.assign(dims, grid.axes.front());
  else
    raise(Errc::DimensionMismatch, "grid supplies " + std::to_string(grid.axes.size()) +
                                       " axes for " + std::to_string(dims) +
                                       " decision dimensions");
  for (const auto& a : axes) {
    if (a.count < 3) raise(Errc::OutsideDomain, "grid counts must be at least 3");
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo < a.hi))
      raise(Errc::OutsideDomain, "grid bounds must be finite with lo < hi");
  }
  return axes;
}

struct Incumbent {
  long index = -1;             // flat grid index; lowest wins ties
  std::vector<double> point;
  double value = 0.0;
  long feasible = 0;
};

using Feasible = std::function<bool(const std::vector<double>&)>;
using Objective = std::function<double(const std::vector<double>&)>;

Incumbent sweep(const std::vector<GridAxis>& axes, bool maximize, const Feasible& feas,
                const Objective& obj) {
  const int dims = static_cast<int>(axes.size());
  long total = 1;
  std::vector<std::vector<double>> coords(dims);
  for (int i = 0; i < dims; ++i) {
    const auto& a = axes[i];
    coords[i].resize(a.count);
    const double step = (a.hi - a.lo) / (a.count - 1);
    for (int k = 0; k < a.count; ++k) coords[i][k] = a.lo + k * step;
    coords[i].back() = a.hi;
    if (total > 50'000'000 / a.count)
      raise(Errc::DimensionTooLarge, "the grid enumerates too many points");
    total *= a.count;
  }

  Incumbent best;
  std::vector<double> pt(dims);
  for (long n = 0; n < total; ++n) {
    long r = n;
    for (int i = dims - 1; i >= 0; --i) {
      pt[i] = coords[i][r % axes[i].count];
      r /= axes[i].count;
    }
    if (!feas(pt)) continue;
    ++best.feasible;
    const double f = obj(pt);
    if (best.index < 0 || (maximize ? f > best.value : f < best.value)) {
      best.index = n;
      best.point = pt;
      best.value = f;
    }
  }
  return best;
}

// Base sweep plus two shrinking sweeps around the incumbent, then the
// adjacent-point variation at the final resolution as the error bound.
BruteResult refine_and_bound(const std::vector<GridAxis>& base, double refine, bool maximize,
                             const Feasible& feas, const Objective& obj,
                             const std::string& empty_message) {
  const int dims = static_cast<int>(base.size());
  Incumbent best = sweep(base, maximize, feas, obj);
  long evaluations = best.feasible;
  if (best.index < 0) raise(Errc::EmptyFeasibleGrid, empty_message);

  std::vector<GridAxis> window = base;
  for (int pass = 1; pass <= 2; ++pass) {
    for (int i = 0; i < dims; ++i) {
      const double hw = (base[i].hi - base[i].lo) / 2.0 / std::pow(refine, pass);
      double lo = best.point[i] - hw, hi = best.point[i] + hw;
      if (lo < base[i].lo) {
        lo = base[i].lo;
        hi = std::min(base[i].hi, lo + 2.0 * hw);
      }
      if (hi > base[i].hi) {
        hi = base[i].hi;
        lo = std::max(base[i].lo, hi - 2.0 * hw);
      }
      window[i] = {lo, hi, base[i].count};
    }
    Incumbent next = sweep(window, maximize, feas, obj);
    evaluations += next.feasible;
    if (next.index >= 0 && (maximize ? next.value > best.value : next.value < best.value))
      best = next;
  }

  BruteResult out;
  out.value = best.value;
  out.point = best.point;
  out.evaluations = evaluations;
  for (int i = 0; i < dims; ++i) {
    const double step = (window[i].hi - window[i].lo) / (window[i].count - 1);
    for (double sign : {-1.0, 1.0}) {
      std::vector<double> pt = best.point;
      pt[i] += sign * step;
      if (pt[i] < base[i].lo || pt[i] > base[i].hi) continue;
      if (!feas(pt)) continue;
      const double f = obj(pt);
      if (std::isfinite(f) && std::isfinite(best.value))
        out.error_bound = std::max(out.error_bound, std::abs(best.value - f));
    }
  }
  return out;
}

}  // namespace

BruteResult brute_primal(const ScenarioTree& tree, const TradingCone& cone,
                         const PiecewiseUtility& U, const ClaimVector& B, double x,
                         const GridSpec& grid) {
  const int d = tree.asset_count();
  const auto& interior = tree.nonterminal();
  const int dims = static_cast<int>(interior.size()) * d;
  if (dims > 4)
    raise(Errc::DimensionTooLarge, "the strategy grid handles at most 4 decision dimensions, got " +
                                       std::to_string(dims));
  if (static_cast<int>(B.size()) != static_cast<int>(tree.leaves().size()))
    raise(Errc::DimensionMismatch, "claim vector length does not match the leaf count");
  const auto axes = expand_axes(grid, dims);

  Feasible feas = [&](const std::vector<double>& pt) {
    std::vector<double> h(d);
    for (size_t i = 0; i < interior.size(); ++i) {
      for (int a = 0; a < d; ++a) h[a] = pt[i * d + a];
      if (!cone_contains(cone, h)) return false;
    }
    return true;
  };
  Objective obj = [&](const std::vector<double>& pt) {
    Strategy H = Strategy::zeros(tree);
    for (size_t i = 0; i < interior.size(); ++i)
      for (int a = 0; a < d; ++a) H.holdings[interior[i]][a] = pt[i * d + a];
    const ClaimVector g = terminal_gains(tree, H);
    double total = 0.0;
    for (size_t j = 0; j < g.size(); ++j) {
      const double v = U.eval(x + g[j] - B[j]);
      if (v == -kInf) return -kInf;
      total += tree.path_prob(tree.leaves()[j]) * v;
    }
    return total;
  };
  return refine_and_bound(axes, grid.refine, true, feas, obj,
                          "no strategy grid point lies in the trading cone");
}

BruteResult brute_dual(const ScenarioTree& tree, const PolyhedralCone& dc,
                       const PiecewiseUtility& U, const ClaimVector& B, double x,
                       const GridSpec& grid) {
  const auto& leaves = tree.leaves();
  const int dims = static_cast<int>(leaves.size());
  if (dims > 4)
    raise(Errc::DimensionTooLarge,
          "the dual weight grid handles at most 4 leaves, got " + std::to_string(dims));
  if (static_cast<int>(B.size()) != dims)
    raise(Errc::DimensionMismatch, "claim vector length does not match the leaf count");
  const auto axes = expand_axes(grid, dims);

  Feasible feas = [&](const std::vector<double>& pt) {
    DualMeasure nu;
    nu.weights = pt;
    return dc.contains(nu);
  };
  Objective obj = [&](const std::vector<double>& pt) {
    double total = 0.0;
    for (int j = 0; j < dims; ++j) {
      const double P = tree.path_prob(leaves[j]);
      const double term = P * U.conjugate(std::max(0.0, pt[j] / P));
      if (term == kInf) return kInf;
      total += term + pt[j] * (x - B[j]);
    }
    return total;
  };
  return refine_and_bound(axes, grid.refine, false, feas, obj,
                          "no weight grid point lies in the dual cone");
}

ConjugateProbe brute_conjugate(const PiecewiseUtility& U, double y, const GridSpec& grid) {
  if (!(y > 0.0)) raise(Errc::NegativeArgument, "conjugate probe needs y > 0");
  const int n = grid.axes.empty() ? 8193 : std::max(grid.axes.front().count, 3);
  const double llo = std::log(1e-9), lhi = std::log(1e9);

  std::vector<std::pair<double, double>> seen;  // (z, objective)
  seen.reserve(3 * static_cast<size_t>(n));
  double best = -kInf, best_lz = llo;
  auto scan = [&](double a, double b) {
    const double h = (b - a) / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double lz = a + k * h, z = std::exp(lz);
      const double f = U.eval(z) - z * y;
      seen.emplace_back(z, f);
      if (f > best) {
        best = f;
        best_lz = lz;
      }
    }
    return h;
  };

  double h = scan(llo, lhi);
  for (int pass = 0; pass < 2; ++pass) {
    const double a = std::max(llo, best_lz - 2.0 * h);
    const double b = std::min(lhi, best_lz + 2.0 * h);
    h = scan(a, b);
  }

  ConjugateProbe probe;
  probe.value = best;
  probe.lo = kInf;
  probe.hi = -kInf;
  for (const auto& [z, f] : seen) {
    if (f >= best - 1e-9) {
      probe.lo = std::min(probe.lo, z);
      probe.hi = std::max(probe.hi, z);
    }
  }
  return probe;
}

}  // namespace dualmax
