#include "dualmax/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dualmax/errors.hpp"

namespace dualmax {
namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

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
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += num(v[i]);
  }
  return out + "]";
}

[[noreturn]] void bad(const std::string& source, const std::string& detail) {
  raise(Errc::ParseError, source + ": " + detail);
}

json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(source, e.what());
  }
}

const json& field(const json& j, const char* key, const std::string& source,
                  const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) bad(source, ctx + " is missing '" + key + "'");
  return *it;
}

double take_num(const json& j, const std::string& source, const std::string& ctx) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  bad(source, ctx + " is not a number");
}

double get_num(const json& j, const char* key, const std::string& source,
               const std::string& ctx) {
  return take_num(field(j, key, source, ctx), source, ctx + "." + key);
}

long get_int(const json& j, const char* key, const std::string& source, const std::string& ctx) {
  const json& v = field(j, key, source, ctx);
  if (!v.is_number_integer()) bad(source, ctx + "." + key + " is not an integer");
  return v.get<long>();
}

bool get_bool(const json& j, const char* key, const std::string& source, const std::string& ctx) {
  const json& v = field(j, key, source, ctx);
  if (!v.is_boolean()) bad(source, ctx + "." + key + " is not a boolean");
  return v.get<bool>();
}

std::vector<double> take_num_list(const json& j, const std::string& source,
                                  const std::string& ctx) {
  if (!j.is_array()) bad(source, ctx + " is not an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(take_num(j[i], source, ctx + "[" + std::to_string(i) + "]"));
  return out;
}

// ---------------------------------------------------------------------------
// emitters

void emit_model(std::ostream& os, const MarketModel& m, const std::string& pad) {
  const auto& tree = m.tree;
  os << "{\n";
  os << pad << "  \"assets\": " << tree.asset_count() << ",\n";
  os << pad << "  \"horizon\": " << tree.horizon() << ",\n";
  os << pad << "  \"nodes\": [\n";
  for (int id = 0; id < tree.node_count(); ++id) {
    const TreeNode& n = tree.node(id);
    os << pad << "    {\"id\": " << n.id << ", \"parent\": " << n.parent << ", \"t\": " << n.t
       << ", \"prob\": " << num(n.prob) << ", \"prices\": " << num_list(n.prices) << "}";
    os << (id + 1 < tree.node_count() ? ",\n" : "\n");
  }
  os << pad << "  ],\n";
  os << pad << "  \"cone\": {\"generators\": [";
  for (size_t i = 0; i < m.cone.generators.size(); ++i) {
    if (i) os << ", ";
    os << num_list(m.cone.generators[i]);
  }
  os << "]}\n" << pad << "}";
}

const char* kind_name(PieceKind k) {
  switch (k) {
    case PieceKind::Power: return "power";
    case PieceKind::Log: return "log";
    case PieceKind::Linear: return "linear";
  }
  return "power";
}

void emit_utility(std::ostream& os, const PiecewiseUtility& U, const std::string& pad) {
  os << "{\n" << pad << "  \"pieces\": [\n";
  const auto& pieces = U.pieces();
  for (size_t i = 0; i < pieces.size(); ++i) {
    const UtilityPiece& p = pieces[i];
    os << pad << "    {\"kind\": \"" << kind_name(p.kind) << "\", \"knot\": " << num(p.knot);
    if (p.kind == PieceKind::Linear)
      os << ", \"slope\": " << num(p.slope) << ", \"intercept\": " << num(p.intercept);
    else
      os << ", \"coef\": " << num(p.coef) << (p.kind == PieceKind::Power
                                                  ? ", \"p\": " + num(p.p)
                                                  : std::string());
    os << "}" << (i + 1 < pieces.size() ? ",\n" : "\n");
  }
  os << pad << "  ]\n" << pad << "}";
}

void emit_claims(std::ostream& os, const ClaimVector& B, const std::string& pad) {
  os << "{\n" << pad << "  \"values\": " << num_list(B) << "\n" << pad << "}";
}

void emit_assumptions(std::ostream& os, const AssumptionReport& gate, const std::string& pad) {
  os << "{\n";
  os << pad << "  \"all_pass\": " << (gate.all_pass() ? "true" : "false") << ",\n";
  os << pad << "  \"failures\": [";
  const auto fails = gate.failures();
  for (size_t i = 0; i < fails.size(); ++i) os << (i ? ", " : "") << '"' << fails[i] << '"';
  os << "],\n";
  os << pad << "  \"utility_slopes\": {\"pass\": " << (gate.inada.passes ? "true" : "false")
     << ", \"inf_slope\": " << num(gate.inada.inf_slope)
     << ", \"sup_slope\": " << num(gate.inada.sup_slope) << "},\n";
  os << pad << "  \"asymptotic_elasticity\": {\"pass\": "
     << (gate.elasticity_finite ? "true" : "false") << ", \"value\": " << num(gate.elasticity.value)
     << ", \"numeric_estimate\": " << num(gate.elasticity.numeric_estimate)
     << ", \"closed_form\": " << (gate.elasticity.closed_form ? "true" : "false")
     << ", \"conjugate_positive_near_zero\": "
     << (gate.elasticity.conjugate_positive_near_zero ? "true" : "false") << "},\n";
  os << pad << "  \"dual_value_finite\": " << (gate.dual_value_finite ? "true" : "false") << ",\n";
  os << pad << "  \"supermartingale_element\": ";
  if (gate.msup)
    os << num_list(gate.msup->weights);
  else
    os << "null";
  os << ",\n";
  os << pad << "  \"endowment_bound\": ";
  if (gate.endowment_bound)
    os << num(*gate.endowment_bound);
  else
    os << "null";
  os << ",\n";
  os << pad << "  \"wealth\": {\"x\": " << num(gate.wealth)
     << ", \"pass\": " << (gate.wealth_ok ? "true" : "false") << "}\n";
  os << pad << "}";
}

// ---------------------------------------------------------------------------
// parsers

MarketModel model_from_json(const json& j, const std::string& source) {
  const int assets = static_cast<int>(get_int(j, "assets", source, "model"));
  const int horizon = static_cast<int>(get_int(j, "horizon", source, "model"));
  const json& jnodes = field(j, "nodes", source, "model");
  if (!jnodes.is_array()) bad(source, "model.nodes is not an array");
  std::vector<TreeNode> nodes;
  nodes.reserve(jnodes.size());
  for (size_t i = 0; i < jnodes.size(); ++i) {
    const std::string ctx = "nodes[" + std::to_string(i) + "]";
    const json& jn = jnodes[i];
    if (!jn.is_object()) bad(source, ctx + " is not an object");
    TreeNode n;
    n.id = static_cast<int>(get_int(jn, "id", source, ctx));
    n.parent = static_cast<int>(get_int(jn, "parent", source, ctx));
    n.t = static_cast<int>(get_int(jn, "t", source, ctx));
    n.prob = get_num(jn, "prob", source, ctx);
    n.prices = take_num_list(field(jn, "prices", source, ctx), source, ctx + ".prices");
    nodes.push_back(std::move(n));
  }
  const json& jcone = field(j, "cone", source, "model");
  const json& jgens = field(jcone, "generators", source, "model.cone");
  if (!jgens.is_array()) bad(source, "model.cone.generators is not an array");
  TradingCone cone;
  for (size_t i = 0; i < jgens.size(); ++i)
    cone.generators.push_back(
        take_num_list(jgens[i], source, "cone.generators[" + std::to_string(i) + "]"));
  return MarketModel{ScenarioTree(assets, horizon, std::move(nodes)), std::move(cone)};
}

PiecewiseUtility utility_from_json(const json& j, const std::string& source) {
  const json& jp = field(j, "pieces", source, "utility");
  if (!jp.is_array() || jp.empty()) bad(source, "utility.pieces is not a nonempty array");
  std::vector<UtilityPiece> pieces;
  for (size_t i = 0; i < jp.size(); ++i) {
    const std::string ctx = "pieces[" + std::to_string(i) + "]";
    const json& pj = jp[i];
    if (!pj.is_object()) bad(source, ctx + " is not an object");
    const json& kind = field(pj, "kind", source, ctx);
    if (!kind.is_string()) bad(source, ctx + ".kind is not a string");
    const std::string k = kind.get<std::string>();
    UtilityPiece p;
    if (k == "power")
      p.kind = PieceKind::Power;
    else if (k == "log")
      p.kind = PieceKind::Log;
    else if (k == "linear")
      p.kind = PieceKind::Linear;
    else
      bad(source, ctx + ".kind must be one of power, log, linear");
    if (pj.contains("knot")) p.knot = get_num(pj, "knot", source, ctx);
    if (pj.contains("coef")) p.coef = get_num(pj, "coef", source, ctx);
    if (pj.contains("p")) p.p = get_num(pj, "p", source, ctx);
    if (pj.contains("slope")) p.slope = get_num(pj, "slope", source, ctx);
    if (pj.contains("intercept")) p.intercept = get_num(pj, "intercept", source, ctx);
    pieces.push_back(p);
  }
  return PiecewiseUtility::from_pieces(std::move(pieces));
}

ClaimVector claims_from_json(const json& j, std::size_t leaves, const std::string& source) {
  ClaimVector B = take_num_list(field(j, "values", source, "claims"), source, "claims.values");
  if (leaves != 0 && B.size() != leaves)
    bad(source, "claims.values has " + std::to_string(B.size()) + " entries for " +
                    std::to_string(leaves) + " terminal nodes");
  return B;
}

AssumptionReport assumptions_from_json(const json& j, const std::string& source) {
  AssumptionReport gate;
  const std::string ctx = "assumptions";
  const json& slopes = field(j, "utility_slopes", source, ctx);
  gate.inada.passes = get_bool(slopes, "pass", source, ctx + ".utility_slopes");
  gate.inada.inf_slope = get_num(slopes, "inf_slope", source, ctx + ".utility_slopes");
  gate.inada.sup_slope = get_num(slopes, "sup_slope", source, ctx + ".utility_slopes");
  const json& ae = field(j, "asymptotic_elasticity", source, ctx);
  gate.elasticity_finite = get_bool(ae, "pass", source, ctx + ".asymptotic_elasticity");
  gate.elasticity.value = get_num(ae, "value", source, ctx + ".asymptotic_elasticity");
  gate.elasticity.numeric_estimate =
      get_num(ae, "numeric_estimate", source, ctx + ".asymptotic_elasticity");
  gate.elasticity.closed_form = get_bool(ae, "closed_form", source, ctx + ".asymptotic_elasticity");
  gate.elasticity.conjugate_positive_near_zero =
      get_bool(ae, "conjugate_positive_near_zero", source, ctx + ".asymptotic_elasticity");
  gate.dual_value_finite = get_bool(j, "dual_value_finite", source, ctx);
  const json& msup = field(j, "supermartingale_element", source, ctx);
  if (!msup.is_null()) {
    DualMeasure m;
    m.weights = take_num_list(msup, source, ctx + ".supermartingale_element");
    gate.msup = std::move(m);
  }
  const json& bound = field(j, "endowment_bound", source, ctx);
  if (!bound.is_null())
    gate.endowment_bound = take_num(bound, source, ctx + ".endowment_bound");
  const json& wealth = field(j, "wealth", source, ctx);
  gate.wealth = get_num(wealth, "x", source, ctx + ".wealth");
  gate.wealth_ok = get_bool(wealth, "pass", source, ctx + ".wealth");
  return gate;
}

}  // namespace

MarketModel parse_model(const std::string& text, const std::string& source) {
  return model_from_json(parse_text(text, source), source);
}

PiecewiseUtility parse_utility(const std::string& text, const std::string& source) {
  return utility_from_json(parse_text(text, source), source);
}

ClaimVector parse_claims(const std::string& text, std::size_t leaves, const std::string& source) {
  return claims_from_json(parse_text(text, source), leaves, source);
}

ReportFile parse_report(const std::string& text, const std::string& source) {
  const json j = parse_text(text, source);
  MarketModel model = model_from_json(field(j, "model", source, "report"), source);
  PiecewiseUtility U = utility_from_json(field(j, "utility", source, "report"), source);
  ClaimVector B = claims_from_json(field(j, "claims", source, "report"),
                                   model.tree.leaves().size(), source);

  const json& js = field(j, "solution", source, "report");
  const std::string ctx = "solution";
  SolveReport rep;
  rep.x = get_num(js, "x", source, ctx);
  rep.u_value = get_num(js, "u_value", source, ctx);
  rep.w_value = get_num(js, "w_value", source, ctx);
  rep.gap = get_num(js, "gap", source, ctx);
  rep.y_star = get_num(js, "y_star", source, ctx);
  const json& backend = field(js, "backend", source, ctx);
  if (!backend.is_string()) bad(source, "solution.backend is not a string");
  rep.backend = backend.get<std::string>();
  rep.iterations = get_int(js, "iterations", source, ctx);
  rep.X_star = take_num_list(field(js, "X_star", source, ctx), source, "solution.X_star");
  rep.nu_star.weights =
      take_num_list(field(js, "nu_star", source, ctx), source, "solution.nu_star");
  const json& jh = field(js, "H_star", source, ctx);
  if (!jh.is_array() || static_cast<int>(jh.size()) != model.tree.node_count())
    bad(source, "solution.H_star must hold one holdings array per tree node");
  rep.H_star.holdings.clear();
  for (size_t i = 0; i < jh.size(); ++i)
    rep.H_star.holdings.push_back(
        take_num_list(jh[i], source, "solution.H_star[" + std::to_string(i) + "]"));
  const json& jr = field(js, "residuals", source, ctx);
  rep.residuals.budget = get_num(jr, "budget", source, "solution.residuals");
  rep.residuals.subdiff_violation =
      get_num(jr, "subdiff_violation", source, "solution.residuals");
  rep.residuals.singular_pairing =
      get_num(jr, "singular_pairing", source, "solution.residuals");
  if (rep.X_star.size() != model.tree.leaves().size() ||
      rep.nu_star.weights.size() != model.tree.leaves().size())
    bad(source, "solution vectors do not match the terminal node count");
  rep.assumptions = assumptions_from_json(field(j, "assumptions", source, "report"), source);

  return ReportFile{std::move(model), std::move(U), std::move(B), std::move(rep)};
}

std::string serialize_model(const MarketModel& model) {
  std::ostringstream os;
  emit_model(os, model, "");
  os << "\n";
  return os.str();
}

std::string serialize_utility(const PiecewiseUtility& U) {
  std::ostringstream os;
  emit_utility(os, U, "");
  os << "\n";
  return os.str();
}

std::string serialize_claims(const ClaimVector& B) {
  std::ostringstream os;
  emit_claims(os, B, "");
  os << "\n";
  return os.str();
}

std::string serialize_assumptions(const AssumptionReport& gate) {
  std::ostringstream os;
  emit_assumptions(os, gate, "");
  os << "\n";
  return os.str();
}

std::string serialize_report(const ReportFile& file) {
  std::ostringstream os;
  const SolveReport& rep = file.report;
  os << "{\n";
  os << "  \"model\": ";
  emit_model(os, file.model, "  ");
  os << ",\n  \"utility\": ";
  emit_utility(os, file.utility, "  ");
  os << ",\n  \"claims\": ";
  emit_claims(os, file.claims, "  ");
  os << ",\n  \"solution\": {\n";
  os << "    \"x\": " << num(rep.x) << ",\n";
  os << "    \"u_value\": " << num(rep.u_value) << ",\n";
  os << "    \"w_value\": " << num(rep.w_value) << ",\n";
  os << "    \"gap\": " << num(rep.gap) << ",\n";
  os << "    \"y_star\": " << num(rep.y_star) << ",\n";
  os << "    \"backend\": \"" << rep.backend << "\",\n";
  os << "    \"iterations\": " << rep.iterations << ",\n";
  os << "    \"X_star\": " << num_list(rep.X_star) << ",\n";
  os << "    \"nu_star\": " << num_list(rep.nu_star.weights) << ",\n";
  os << "    \"H_star\": [";
  for (size_t i = 0; i < rep.H_star.holdings.size(); ++i) {
    if (i) os << ", ";
    os << num_list(rep.H_star.holdings[i]);
  }
  os << "],\n";
  os << "    \"residuals\": {\"budget\": " << num(rep.residuals.budget)
     << ", \"subdiff_violation\": " << num(rep.residuals.subdiff_violation)
     << ", \"singular_pairing\": " << num(rep.residuals.singular_pairing) << "}\n";
  os << "  },\n";
  os << "  \"assumptions\": ";
  emit_assumptions(os, rep.assumptions, "  ");
  os << "\n}\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::ParseError, "cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_new_file(const std::string& path, const std::string& text) {
  if (std::filesystem::exists(path))
    raise(Errc::ParseError, "refusing to overwrite existing file: " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::ParseError, "cannot create file: " + path);
  out << text;
  if (!out.flush()) raise(Errc::ParseError, "failed writing file: " + path);
}

}  // namespace dualmax
