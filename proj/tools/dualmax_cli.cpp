// Command-line surface: assumption checks, duality solves, super-replication
// pricing, optional decomposition, certificate verification, and brute-force
// oracle runs over JSON model files.
//
// Exit codes: 0 success, 1 convergence or verification failure, 2 assumption
// failure, 3 input or parse error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualmax/dual_cone.hpp"
#include "dualmax/errors.hpp"
#include "dualmax/io.hpp"
#include "dualmax/market.hpp"
#include "dualmax/oracle.hpp"
#include "dualmax/solver.hpp"
#include "dualmax/superrep.hpp"
#include "dualmax/utility.hpp"

namespace {

using namespace dualmax;

constexpr double kInf = std::numeric_limits<double>::infinity();

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::NoConvergence:
    case Errc::RelationViolated:
    case Errc::NodeDecompositionFailure:
    case Errc::InternalError:
      return 1;
    case Errc::InfeasibleDualDomain:
    case Errc::WealthBelowEndowmentBound:
    case Errc::AssumptionFailure:
    case Errc::DualUnboundedBelow:
      return 2;
    default:
      return 3;  // unreadable, unparsable, or structurally invalid inputs
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (v == kInf) return "\"inf\"";
  if (v == -kInf) return "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num_list(const std::vector<double>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out + "]";
}

std::string holdings_list(const Strategy& H) {
  std::string out = "[";
  for (size_t i = 0; i < H.holdings.size(); ++i) out += (i ? ", " : "") + num_list(H.holdings[i]);
  return out + "]";
}

struct Config {
  std::string model_path;
  std::string utility_path;
  std::string claims_path;
  std::string out_path;
  std::string backend = "auto";
  std::vector<std::string> grid;
  double wealth = 1.0;
  double tol = 1e-6;
  bool force = false;
};

void deliver(const Config& cfg, const std::string& text, const std::string& summary) {
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    write_new_file(cfg.out_path, text);
    std::cout << summary << " -> " << cfg.out_path << "\n";
  }
}

MarketModel load_model(const Config& cfg) {
  return parse_model(read_file(cfg.model_path), cfg.model_path);
}

PiecewiseUtility load_utility(const Config& cfg) {
  if (cfg.utility_path.empty()) raise(Errc::ParseError, "a utility file is required");
  return parse_utility(read_file(cfg.utility_path), cfg.utility_path);
}

ClaimVector load_claims(const std::string& path, std::size_t leaves) {
  if (path.empty()) return ClaimVector(leaves, 0.0);
  return parse_claims(read_file(path), leaves, path);
}

void validate_run(const Config& cfg) {
  if (!(cfg.tol > 0.0) || cfg.tol > 1e-2)
    raise(Errc::OutsideDomain, "tolerance must lie in (0, 1e-2]");
  if (!std::isfinite(cfg.wealth)) raise(Errc::OutsideDomain, "wealth must be finite");
}

SolveOptions options_from(const Config& cfg) {
  SolveOptions opts;
  opts.tol = cfg.tol;
  opts.force = cfg.force;
  if (cfg.backend == "lp")
    opts.backend = Backend::Lp;
  else if (cfg.backend == "subgradient")
    opts.backend = Backend::Subgradient;
  else if (cfg.backend == "convex")
    opts.backend = Backend::Convex;
  return opts;
}

GridSpec grid_from(const Config& cfg, GridAxis fallback) {
  GridSpec g;
  if (cfg.grid.empty()) {
    g.axes = {fallback};
    return g;
  }
  for (const std::string& s : cfg.grid) {
    GridAxis a;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d", &a.lo, &a.hi, &a.count) != 3)
      raise(Errc::ParseError, "grid spec must be lo:hi:count, got '" + s + "'");
    g.axes.push_back(a);
  }
  return g;
}

int cmd_check(const Config& cfg) {
  validate_run(cfg);
  const MarketModel model = load_model(cfg);
  const PiecewiseUtility U = load_utility(cfg);
  const ClaimVector B = load_claims(cfg.claims_path, model.tree.leaves().size());
  const PolyhedralCone dc = build_dual_cone(model.tree, model.cone);
  const AssumptionReport gate = check_assumptions(model.tree, dc, U, B, cfg.wealth);
  deliver(cfg, serialize_assumptions(gate),
          gate.all_pass() ? "assumptions pass" : "assumption failures");
  return gate.all_pass() ? 0 : 2;
}

int cmd_solve(const Config& cfg) {
  validate_run(cfg);
  const MarketModel model = load_model(cfg);
  const PiecewiseUtility U = load_utility(cfg);
  const ClaimVector B = load_claims(cfg.claims_path, model.tree.leaves().size());

  const SolveReport rep = solve(model.tree, model.cone, U, B, cfg.wealth, options_from(cfg));
  const RelationCertificate cert = verify_relations(model.tree, rep, U, B, cfg.tol);

  std::ostringstream summary;
  summary << "u = " << num(rep.u_value) << ", w = " << num(rep.w_value)
          << ", gap = " << num(rep.gap) << ", backend " << rep.backend;
  deliver(cfg, serialize_report(ReportFile{model, U, B, rep}), summary.str());
  require_relations(cert);
  return 0;
}

int cmd_price(const Config& cfg) {
  const MarketModel model = load_model(cfg);
  if (cfg.claims_path.empty()) raise(Errc::ParseError, "a claims file is required");
  const ClaimVector R = load_claims(cfg.claims_path, model.tree.leaves().size());
  const PolyhedralCone dc = build_dual_cone(model.tree, model.cone);
  const PriceResult pr = superrep_price(dc, model.tree, model.cone, R);

  std::ostringstream os;
  os << "{\n  \"price\": " << num(pr.price) << ",\n  \"hedge\": " << holdings_list(pr.witness)
     << "\n}\n";
  deliver(cfg, os.str(), "price = " + num(pr.price));
  return 0;
}

int cmd_decompose(const Config& cfg) {
  const MarketModel model = load_model(cfg);
  if (cfg.claims_path.empty()) raise(Errc::ParseError, "a claims file is required");
  const ClaimVector R = load_claims(cfg.claims_path, model.tree.leaves().size());
  const PolyhedralCone dc = build_dual_cone(model.tree, model.cone);
  const DecompositionResult dec = decompose_claim(dc, model.tree, model.cone, R);

  std::ostringstream os;
  os << "{\n";
  os << "  \"initial\": " << num(dec.value[model.tree.root()]) << ",\n";
  os << "  \"value\": " << num_list(dec.value) << ",\n";
  os << "  \"consumption\": " << num_list(dec.consumption) << ",\n";
  os << "  \"hedge\": " << holdings_list(dec.hedge) << "\n";
  os << "}\n";
  deliver(cfg, os.str(), "initial capital = " + num(dec.value[model.tree.root()]));
  return 0;
}

int cmd_verify(const Config& cfg) {
  validate_run(cfg);
  const ReportFile rf = parse_report(read_file(cfg.model_path), cfg.model_path);
  const RelationCertificate cert =
      verify_relations(rf.model.tree, rf.report, rf.utility, rf.claims, cfg.tol);

  std::ostringstream os;
  os << "{\n  \"tol\": " << num(cert.tol) << ",\n  \"all_pass\": "
     << (cert.all_pass() ? "true" : "false") << ",\n  \"checks\": [\n";
  for (size_t i = 0; i < cert.checks.size(); ++i) {
    const auto& c = cert.checks[i];
    os << "    {\"name\": \"" << c.name << "\", \"magnitude\": " << num(c.magnitude)
       << ", \"pass\": " << (c.pass ? "true" : "false") << "}"
       << (i + 1 < cert.checks.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  deliver(cfg, os.str(), cert.all_pass() ? "relations verified" : "relation failures");
  require_relations(cert);
  return 0;
}

int cmd_oracle(const Config& cfg) {
  validate_run(cfg);
  const MarketModel model = load_model(cfg);
  const PiecewiseUtility U = load_utility(cfg);
  const ClaimVector B = load_claims(cfg.claims_path, model.tree.leaves().size());
  const PolyhedralCone dc = build_dual_cone(model.tree, model.cone);

  const AssumptionReport gate = check_assumptions(model.tree, dc, U, B, cfg.wealth);
  if (!cfg.force && !gate.all_pass()) {
    std::string what = "assumption check failed:";
    for (const auto& f : gate.failures()) what += " " + f;
    raise(Errc::AssumptionFailure, what);
  }

  const GridSpec pgrid = grid_from(cfg, GridAxis{-2.0, 2.0, 201});
  const BruteResult bp = brute_primal(model.tree, model.cone, U, B, cfg.wealth, pgrid);

  GridSpec dgrid;
  const int n0 = pgrid.axes.front().count;
  dgrid.axes = {GridAxis{0.0, std::max(1.0, 2.0 * std::abs(cfg.wealth)), n0}};
  const BruteResult bd = brute_dual(model.tree, dc, U, B, cfg.wealth, dgrid);

  SolveReport rep;
  rep.x = cfg.wealth;
  rep.u_value = bp.value;
  rep.w_value = bd.value;
  rep.gap = std::abs(bp.value - bd.value);
  rep.backend = "brute";
  rep.iterations = bp.evaluations + bd.evaluations;
  rep.assumptions = gate;

  rep.H_star = Strategy::zeros(model.tree);
  const auto& interior = model.tree.nonterminal();
  const int d = model.tree.asset_count();
  for (size_t i = 0; i < interior.size(); ++i)
    for (int a = 0; a < d; ++a) rep.H_star.holdings[interior[i]][a] = bp.point[i * d + a];
  const ClaimVector gains = terminal_gains(model.tree, rep.H_star);
  for (size_t j = 0; j < gains.size(); ++j) rep.X_star.push_back(cfg.wealth + gains[j] - B[j]);
  rep.nu_star.weights = bd.point;
  rep.y_star = rep.nu_star.mass();

  rep.residuals.budget = std::abs(pairing(rep.nu_star, rep.X_star) - cfg.wealth * rep.y_star);
  rep.residuals.singular_pairing = 0.0;
  double worst = 0.0;
  for (size_t j = 0; j < gains.size(); ++j) {
    const double y = rep.nu_star.weights[j] / model.tree.path_prob(model.tree.leaves()[j]);
    if (!(y > 0.0)) continue;
    try {
      const SubdiffInterval I = U.conjugate_argmax(y);
      const double z = rep.X_star[j] - B[j];
      worst = std::max(worst, std::max(I.lo - z, z - I.hi));
    } catch (const Error&) {
      worst = kInf;
    }
  }
  rep.residuals.subdiff_violation = std::max(worst, 0.0);

  std::ostringstream summary;
  summary << "brute u = " << num(rep.u_value) << " (err " << num(bp.error_bound) << "), w = "
          << num(rep.w_value) << " (err " << num(bd.error_bound) << ")";
  deliver(cfg, serialize_report(ReportFile{model, U, B, rep}), summary.str());

  if (rep.gap > bp.error_bound + bd.error_bound + cfg.tol)
    raise(Errc::NoConvergence, "brute duality gap " + num(rep.gap) +
                                   " exceeds the grid error bounds plus tolerance");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utility maximization duality on scenario-tree markets"};
  app.require_subcommand(1);

  Config cfg;
  const std::string grid_help =
      "grid axis as lo:hi:count (repeatable per strategy dimension; the oracle's "
      "weight grid reuses the first count on [0, max(1, 2|wealth|)])";

  auto add_common = [&](CLI::App* sub, bool needs_utility, bool needs_wealth) {
    sub->add_option("model", cfg.model_path, "market model JSON file")->required();
    if (needs_utility) {
      sub->add_option("--utility", cfg.utility_path, "utility JSON file")->required();
      sub->add_option("--endowment", cfg.claims_path, "endowment claim JSON file");
      auto* w = sub->add_option("--wealth", cfg.wealth, "initial wealth x");
      if (needs_wealth) w->required();
    }
    sub->add_option("--tol", cfg.tol, "certified-gap tolerance, in (0, 1e-2]");
    sub->add_option("--out", cfg.out_path, "write the report to this new file");
  };

  auto* check = app.add_subcommand("check", "run the assumption gate on a model and utility");
  add_common(check, true, false);

  auto* solve = app.add_subcommand("solve", "solve the primal and dual problems with certificates");
  add_common(solve, true, true);
  solve->add_option("--backend", cfg.backend, "solver backend")
      ->check(CLI::IsMember({"auto", "lp", "subgradient", "convex", "brute"}));
  solve->add_flag("--force", cfg.force, "run even when the assumption gate fails");
  solve->add_option("--grid", cfg.grid, grid_help);

  auto* price = app.add_subcommand("price", "super-replication price of a claim with its hedge");
  price->add_option("model", cfg.model_path, "market model JSON file")->required();
  price->add_option("--claims", cfg.claims_path, "claim JSON file")->required();
  price->add_option("--out", cfg.out_path, "write the result to this new file");

  auto* decompose =
      app.add_subcommand("decompose", "optional decomposition of a claim's value process");
  decompose->add_option("model", cfg.model_path, "market model JSON file")->required();
  decompose->add_option("--claims", cfg.claims_path, "claim JSON file")->required();
  decompose->add_option("--out", cfg.out_path, "write the result to this new file");

  auto* verify = app.add_subcommand("verify", "re-check the optimality relations of a report file");
  verify->add_option("report", cfg.model_path, "solve report JSON file")->required();
  verify->add_option("--tol", cfg.tol, "relation tolerance, in (0, 1e-2]");
  verify->add_option("--out", cfg.out_path, "write the check results to this new file");

  auto* oracle = app.add_subcommand("oracle", "brute-force grid reference solve");
  add_common(oracle, true, true);
  oracle->add_flag("--force", cfg.force, "run even when the assumption gate fails");
  oracle->add_option("--grid", cfg.grid, grid_help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (app.got_subcommand(check)) return cmd_check(cfg);
    if (app.got_subcommand(solve)) {
      if (cfg.backend == "brute") return cmd_oracle(cfg);
      return cmd_solve(cfg);
    }
    if (app.got_subcommand(price)) return cmd_price(cfg);
    if (app.got_subcommand(decompose)) return cmd_decompose(cfg);
    if (app.got_subcommand(verify)) return cmd_verify(cfg);
    if (app.got_subcommand(oracle)) return cmd_oracle(cfg);
  } catch (const dualmax::Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
