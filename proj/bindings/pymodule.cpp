// Python bindings for the scenario-tree duality library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dualmax/dual_cone.hpp"
#include "dualmax/errors.hpp"
#include "dualmax/io.hpp"
#include "dualmax/market.hpp"
#include "dualmax/oracle.hpp"
#include "dualmax/solver.hpp"
#include "dualmax/superrep.hpp"
#include "dualmax/utility.hpp"

namespace py = pybind11;
using namespace dualmax;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Constrained utility maximization and superhedging duality on scenario trees";

  py::register_exception<Error>(m, "Error");

  // --- market ---------------------------------------------------------------

  py::class_<TreeNode>(m, "TreeNode")
      .def(py::init([](int id, int parent, int t, double prob, std::vector<double> prices) {
             TreeNode n;
             n.id = id;
             n.parent = parent;
             n.t = t;
             n.prob = prob;
             n.prices = std::move(prices);
             return n;
           }),
           py::arg("id"), py::arg("parent"), py::arg("t"), py::arg("prob"), py::arg("prices"))
      .def_readwrite("id", &TreeNode::id)
      .def_readwrite("parent", &TreeNode::parent)
      .def_readwrite("t", &TreeNode::t)
      .def_readwrite("prob", &TreeNode::prob)
      .def_readwrite("prices", &TreeNode::prices);

  py::class_<ScenarioTree>(m, "ScenarioTree")
      .def(py::init<int, int, std::vector<TreeNode>>(), py::arg("asset_count"),
           py::arg("horizon"), py::arg("nodes"))
      .def_property_readonly("asset_count", &ScenarioTree::asset_count)
      .def_property_readonly("horizon", &ScenarioTree::horizon)
      .def_property_readonly("node_count", &ScenarioTree::node_count)
      .def_property_readonly("root", &ScenarioTree::root)
      .def("node", &ScenarioTree::node, py::return_value_policy::reference_internal)
      .def("children", &ScenarioTree::children)
      .def("is_leaf", &ScenarioTree::is_leaf)
      .def_property_readonly("leaves", &ScenarioTree::leaves)
      .def_property_readonly("nonterminal", &ScenarioTree::nonterminal)
      .def("leaf_index", &ScenarioTree::leaf_index)
      .def("path_prob", &ScenarioTree::path_prob)
      .def("price_step", &ScenarioTree::price_step);

  py::class_<TradingCone>(m, "TradingCone")
      .def(py::init([](std::vector<std::vector<double>> generators) {
             return TradingCone{std::move(generators)};
           }),
           py::arg("generators"))
      .def_readwrite("generators", &TradingCone::generators)
      .def_property_readonly("dim", &TradingCone::dim);

  py::class_<Strategy>(m, "Strategy")
      .def(py::init<>())
      .def_readwrite("holdings", &Strategy::holdings)
      .def_static("zeros", &Strategy::zeros, py::arg("tree"));

  py::class_<AdmissibilityReport>(m, "AdmissibilityReport")
      .def_readonly("admissible", &AdmissibilityReport::admissible)
      .def_readonly("reasons", &AdmissibilityReport::reasons);

  m.def("cone_contains", &cone_contains, py::arg("cone"), py::arg("v"), py::arg("tol") = 1e-9);
  m.def("gains_process", &gains_process, py::arg("tree"), py::arg("strategy"));
  m.def("terminal_gains", &terminal_gains, py::arg("tree"), py::arg("strategy"));
  m.def("is_admissible", &is_admissible, py::arg("tree"), py::arg("cone"), py::arg("strategy"),
        py::arg("floor") = std::numeric_limits<double>::infinity());
  m.def("expected_value", &expected_value, py::arg("tree"), py::arg("v"));

  // --- utility ----------------------------------------------------------------

  py::enum_<PieceKind>(m, "PieceKind")
      .value("Power", PieceKind::Power)
      .value("Log", PieceKind::Log)
      .value("Linear", PieceKind::Linear);

  py::class_<UtilityPiece>(m, "UtilityPiece")
      .def(py::init([](PieceKind kind, double knot, double coef, double p, double slope,
                       double intercept) {
             UtilityPiece piece;
             piece.kind = kind;
             piece.knot = knot;
             piece.coef = coef;
             piece.p = p;
             piece.slope = slope;
             piece.intercept = intercept;
             return piece;
           }),
           py::arg("kind"), py::arg("knot") = 0.0, py::arg("coef") = 1.0, py::arg("p") = 0.5,
           py::arg("slope") = 0.0, py::arg("intercept") = 0.0)
      .def_readwrite("kind", &UtilityPiece::kind)
      .def_readwrite("knot", &UtilityPiece::knot)
      .def_readwrite("coef", &UtilityPiece::coef)
      .def_readwrite("p", &UtilityPiece::p)
      .def_readwrite("slope", &UtilityPiece::slope)
      .def_readwrite("intercept", &UtilityPiece::intercept)
      .def_readonly("offset", &UtilityPiece::offset);

  py::class_<SubdiffInterval>(m, "SubdiffInterval")
      .def_readonly("lo", &SubdiffInterval::lo)
      .def_readonly("hi", &SubdiffInterval::hi)
      .def("contains", &SubdiffInterval::contains, py::arg("v"), py::arg("tol") = 0.0);

  py::class_<InadaReport>(m, "InadaReport")
      .def_readonly("inf_slope", &InadaReport::inf_slope)
      .def_readonly("sup_slope", &InadaReport::sup_slope)
      .def_readonly("passes", &InadaReport::passes);

  py::class_<ElasticityReport>(m, "ElasticityReport")
      .def_readonly("value", &ElasticityReport::value)
      .def_readonly("numeric_estimate", &ElasticityReport::numeric_estimate)
      .def_readonly("closed_form", &ElasticityReport::closed_form)
      .def_readonly("conjugate_positive_near_zero",
                    &ElasticityReport::conjugate_positive_near_zero);

  py::class_<PiecewiseUtility>(m, "PiecewiseUtility")
      .def_static("power", &PiecewiseUtility::power, py::arg("coef"), py::arg("p"))
      .def_static("log", &PiecewiseUtility::log_utility, py::arg("coef") = 1.0)
      .def_static("linear", &PiecewiseUtility::linear, py::arg("slope"),
                  py::arg("intercept") = 0.0)
      .def_static("from_pieces", &PiecewiseUtility::from_pieces, py::arg("pieces"))
      .def_property_readonly("pieces", &PiecewiseUtility::pieces)
      .def("piecewise_linear", &PiecewiseUtility::piecewise_linear)
      .def("eval", &PiecewiseUtility::eval, py::arg("x"))
      .def("subdiff", &PiecewiseUtility::subdiff, py::arg("x"))
      .def("conjugate", &PiecewiseUtility::conjugate, py::arg("y"))
      .def("conjugate_argmax", &PiecewiseUtility::conjugate_argmax, py::arg("y"))
      .def("conjugate_curvature", &PiecewiseUtility::conjugate_curvature, py::arg("y"))
      .def("inada", &PiecewiseUtility::inada)
      .def("tail_slope", &PiecewiseUtility::tail_slope)
      .def("head_slope", &PiecewiseUtility::head_slope)
      .def("sup_value", &PiecewiseUtility::sup_value)
      .def("value_at_zero", &PiecewiseUtility::value_at_zero)
      .def("smallest_maximizer", &PiecewiseUtility::smallest_maximizer);

  m.def("asymptotic_elasticity", &asymptotic_elasticity, py::arg("utility"),
        py::arg("y_floor") = 1e-300);

  // --- dual cone ----------------------------------------------------------------

  py::class_<DualMeasure>(m, "DualMeasure")
      .def(py::init([](std::vector<double> weights) { return DualMeasure{std::move(weights)}; }),
           py::arg("weights"))
      .def_readwrite("weights", &DualMeasure::weights)
      .def("mass", &DualMeasure::mass)
      .def("densities", &DualMeasure::densities, py::arg("tree"));

  py::class_<PolyhedralCone>(m, "PolyhedralCone")
      .def_property_readonly("leaf_count", &PolyhedralCone::leaf_count)
      .def_property_readonly("rows", &PolyhedralCone::rows)
      .def("contains", &PolyhedralCone::contains, py::arg("nu"), py::arg("tol") = 1e-9);

  m.def("build_dual_cone", &build_dual_cone, py::arg("tree"), py::arg("cone"));
  m.def("pairing", &pairing, py::arg("nu"), py::arg("claim"));
  m.def("find_msup_element", &find_msup_element, py::arg("dual_cone"), py::arg("tree"));
  m.def("endowment_bound", &endowment_bound, py::arg("dual_cone"), py::arg("tree"),
        py::arg("claim"));

  // --- super-replication -----------------------------------------------------------

  py::class_<SuperRepFeasibility>(m, "SuperRepFeasibility")
      .def_readonly("feasible", &SuperRepFeasibility::feasible)
      .def_readonly("witness", &SuperRepFeasibility::witness)
      .def_readonly("shortfall", &SuperRepFeasibility::shortfall);

  py::class_<PriceResult>(m, "PriceResult")
      .def_readonly("price", &PriceResult::price)
      .def_readonly("witness", &PriceResult::witness);

  py::class_<DecompositionResult>(m, "DecompositionResult")
      .def_readonly("value", &DecompositionResult::value)
      .def_readonly("hedge", &DecompositionResult::hedge)
      .def_readonly("consumption", &DecompositionResult::consumption);

  m.def("superreplicable_primal", &superreplicable_primal, py::arg("tree"), py::arg("cone"),
        py::arg("claim"), py::arg("tol") = 1e-8);
  m.def("superreplicable_dual", &superreplicable_dual, py::arg("dual_cone"), py::arg("tree"),
        py::arg("claim"), py::arg("tol") = 1e-8);
  m.def("superrep_price", &superrep_price, py::arg("dual_cone"), py::arg("tree"), py::arg("cone"),
        py::arg("claim"));
  m.def("decompose_claim", &decompose_claim, py::arg("dual_cone"), py::arg("tree"),
        py::arg("cone"), py::arg("claim"));

  // --- solver --------------------------------------------------------------------

  py::enum_<Backend>(m, "Backend")
      .value("Auto", Backend::Auto)
      .value("Lp", Backend::Lp)
      .value("Subgradient", Backend::Subgradient)
      .value("Convex", Backend::Convex);

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("backend", &SolveOptions::backend)
      .def_readwrite("tol", &SolveOptions::tol)
      .def_readwrite("max_iterations", &SolveOptions::max_iterations)
      .def_readwrite("force", &SolveOptions::force);

  py::class_<AssumptionReport>(m, "AssumptionReport")
      .def_readonly("inada", &AssumptionReport::inada)
      .def_readonly("elasticity", &AssumptionReport::elasticity)
      .def_readonly("elasticity_finite", &AssumptionReport::elasticity_finite)
      .def_readonly("msup", &AssumptionReport::msup)
      .def_readonly("dual_value_finite", &AssumptionReport::dual_value_finite)
      .def_readonly("endowment_bound", &AssumptionReport::endowment_bound)
      .def_readonly("wealth", &AssumptionReport::wealth)
      .def_readonly("wealth_ok", &AssumptionReport::wealth_ok)
      .def("all_pass", &AssumptionReport::all_pass)
      .def("failures", &AssumptionReport::failures);

  m.def("check_assumptions", &check_assumptions, py::arg("tree"), py::arg("dual_cone"),
        py::arg("utility"), py::arg("claim"), py::arg("wealth"));

  py::class_<Residuals>(m, "Residuals")
      .def_readonly("budget", &Residuals::budget)
      .def_readonly("subdiff_violation", &Residuals::subdiff_violation)
      .def_readonly("singular_pairing", &Residuals::singular_pairing);

  py::class_<PrimalSolution>(m, "PrimalSolution")
      .def_readonly("u_value", &PrimalSolution::u_value)
      .def_readonly("H_star", &PrimalSolution::H_star)
      .def_readonly("X_star", &PrimalSolution::X_star)
      .def_readonly("iterations", &PrimalSolution::iterations)
      .def_readonly("backend", &PrimalSolution::backend);

  py::class_<DualSolution>(m, "DualSolution")
      .def_readonly("w_value", &DualSolution::w_value)
      .def_readonly("nu_star", &DualSolution::nu_star)
      .def_readonly("iterations", &DualSolution::iterations)
      .def_readonly("backend", &DualSolution::backend);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("x", &SolveReport::x)
      .def_readonly("u_value", &SolveReport::u_value)
      .def_readonly("w_value", &SolveReport::w_value)
      .def_readonly("gap", &SolveReport::gap)
      .def_readonly("y_star", &SolveReport::y_star)
      .def_readonly("X_star", &SolveReport::X_star)
      .def_readonly("H_star", &SolveReport::H_star)
      .def_readonly("nu_star", &SolveReport::nu_star)
      .def_readonly("residuals", &SolveReport::residuals)
      .def_readonly("backend", &SolveReport::backend)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("assumptions", &SolveReport::assumptions);

  m.def("solve_primal", &solve_primal, py::arg("tree"), py::arg("cone"), py::arg("utility"),
        py::arg("claim"), py::arg("wealth"), py::arg("options") = SolveOptions{});
  m.def("solve_dual", &solve_dual, py::arg("tree"), py::arg("dual_cone"), py::arg("utility"),
        py::arg("claim"), py::arg("wealth"), py::arg("options") = SolveOptions{});
  m.def("solve", &solve, py::arg("tree"), py::arg("cone"), py::arg("utility"), py::arg("claim"),
        py::arg("wealth"), py::arg("options") = SolveOptions{});

  py::class_<RelationCheck>(m, "RelationCheck")
      .def_readonly("name", &RelationCheck::name)
      .def_readonly("magnitude", &RelationCheck::magnitude)
      .def_readonly("pass_", &RelationCheck::pass)
      .def("__repr__", [](const RelationCheck& c) {
        return "RelationCheck(" + c.name + (c.pass ? ", pass)" : ", fail)");
      });

  py::class_<RelationCertificate>(m, "RelationCertificate")
      .def_readonly("checks", &RelationCertificate::checks)
      .def_readonly("tol", &RelationCertificate::tol)
      .def("all_pass", &RelationCertificate::all_pass);

  m.def("verify_relations", &verify_relations, py::arg("tree"), py::arg("report"),
        py::arg("utility"), py::arg("claim"), py::arg("tol"));
  m.def("require_relations", &require_relations, py::arg("certificate"));

  // --- oracle ----------------------------------------------------------------------

  py::class_<GridAxis>(m, "GridAxis")
      .def(py::init([](double lo, double hi, int count) {
             GridAxis axis;
             axis.lo = lo;
             axis.hi = hi;
             axis.count = count;
             return axis;
           }),
           py::arg("lo"), py::arg("hi"), py::arg("count"))
      .def_readwrite("lo", &GridAxis::lo)
      .def_readwrite("hi", &GridAxis::hi)
      .def_readwrite("count", &GridAxis::count);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](std::vector<GridAxis> axes, double refine) {
             GridSpec spec;
             spec.axes = std::move(axes);
             spec.refine = refine;
             return spec;
           }),
           py::arg("axes"), py::arg("refine") = 4.0)
      .def_readwrite("axes", &GridSpec::axes)
      .def_readwrite("refine", &GridSpec::refine);

  py::class_<BruteResult>(m, "BruteResult")
      .def_readonly("value", &BruteResult::value)
      .def_readonly("error_bound", &BruteResult::error_bound)
      .def_readonly("point", &BruteResult::point)
      .def_readonly("evaluations", &BruteResult::evaluations);

  py::class_<ConjugateProbe>(m, "ConjugateProbe")
      .def_readonly("value", &ConjugateProbe::value)
      .def_readonly("lo", &ConjugateProbe::lo)
      .def_readonly("hi", &ConjugateProbe::hi);

  m.def("brute_primal", &brute_primal, py::arg("tree"), py::arg("cone"), py::arg("utility"),
        py::arg("claim"), py::arg("wealth"), py::arg("grid"));
  m.def("brute_dual", &brute_dual, py::arg("tree"), py::arg("dual_cone"), py::arg("utility"),
        py::arg("claim"), py::arg("wealth"), py::arg("grid"));
  m.def("brute_conjugate", &brute_conjugate, py::arg("utility"), py::arg("y"),
        py::arg("grid") = GridSpec{});

  // --- files -------------------------------------------------------------------------

  py::class_<MarketModel>(m, "MarketModel")
      .def(py::init([](ScenarioTree tree, TradingCone cone) {
             return MarketModel{std::move(tree), std::move(cone)};
           }),
           py::arg("tree"), py::arg("cone"))
      .def_readwrite("tree", &MarketModel::tree)
      .def_readwrite("cone", &MarketModel::cone);

  py::class_<ReportFile>(m, "ReportFile")
      .def(py::init([](MarketModel model, PiecewiseUtility utility, ClaimVector claims,
                       SolveReport report) {
             return ReportFile{std::move(model), std::move(utility), std::move(claims),
                               std::move(report)};
           }),
           py::arg("model"), py::arg("utility"), py::arg("claims"), py::arg("report"))
      .def_readwrite("model", &ReportFile::model)
      .def_readwrite("utility", &ReportFile::utility)
      .def_readwrite("claims", &ReportFile::claims)
      .def_readonly("report", &ReportFile::report);

  m.def("parse_model", &parse_model, py::arg("text"), py::arg("source") = "input");
  m.def("parse_utility", &parse_utility, py::arg("text"), py::arg("source") = "input");
  m.def("parse_claims", &parse_claims, py::arg("text"), py::arg("leaves") = 0,
        py::arg("source") = "input");
  m.def("parse_report", &parse_report, py::arg("text"), py::arg("source") = "input");
  m.def("serialize_model", &serialize_model, py::arg("model"));
  m.def("serialize_utility", &serialize_utility, py::arg("utility"));
  m.def("serialize_claims", &serialize_claims, py::arg("claims"));
  m.def("serialize_report", &serialize_report, py::arg("file"));
  m.def("serialize_assumptions", &serialize_assumptions, py::arg("gate"));
}
