#pragma once

// JSON formats for markets, utilities, claims, assumption reports, and solve
// certificates, plus small file helpers.  Numbers serialize with 17
// significant digits so parsing the output reproduces the doubles exactly;
// non-finite values travel as the strings "inf", "-inf", "nan".

#include <string>

#include "dualmax/market.hpp"
#include "dualmax/solver.hpp"
#include "dualmax/utility.hpp"

namespace dualmax {

struct MarketModel {
  ScenarioTree tree;
  TradingCone cone;
};

// A solve certificate bundles the inputs with the solution, so it re-verifies
// from the file alone.
struct ReportFile {
  MarketModel model;
  PiecewiseUtility utility;
  ClaimVector claims;  // endowment, zero when none was given
  SolveReport report;
};

// Parsers raise ParseError naming the source and the offending field.
MarketModel parse_model(const std::string& text, const std::string& source = "input");
PiecewiseUtility parse_utility(const std::string& text, const std::string& source = "input");
// `leaves` is the expected length; pass 0 to skip that check.
ClaimVector parse_claims(const std::string& text, std::size_t leaves,
                         const std::string& source = "input");
ReportFile parse_report(const std::string& text, const std::string& source = "input");

std::string serialize_model(const MarketModel& model);
std::string serialize_utility(const PiecewiseUtility& U);
std::string serialize_claims(const ClaimVector& B);
std::string serialize_report(const ReportFile& file);
std::string serialize_assumptions(const AssumptionReport& gate);

std::string read_file(const std::string& path);
// Creates the file; refuses to overwrite anything that already exists.
void write_new_file(const std::string& path, const std::string& text);

}  // namespace dualmax
