#include "dualmax/errors.hpp"

namespace dualmax {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonPositivePrice: return "NonPositivePrice";
    case Errc::ProbabilityNotNormalized: return "ProbabilityNotNormalized";
    case Errc::RaggedTree: return "RaggedTree";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::MissingNode: return "MissingNode";
    case Errc::NonPositivePoint: return "NonPositivePoint";
    case Errc::NegativeArgument: return "NegativeArgument";
    case Errc::OutsideDomain: return "OutsideDomain";
    case Errc::InfeasibleDualDomain: return "InfeasibleDualDomain";
    case Errc::WealthBelowEndowmentBound: return "WealthBelowEndowmentBound";
    case Errc::AssumptionFailure: return "AssumptionFailure";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DualUnboundedBelow: return "DualUnboundedBelow";
    case Errc::NodeDecompositionFailure: return "NodeDecompositionFailure";
    case Errc::RelationViolated: return "RelationViolated";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::EmptyFeasibleGrid: return "EmptyFeasibleGrid";
    case Errc::ParseError: return "ParseError";
    case Errc::InternalError: return "InternalError";
  }
  return "UnknownError";
}

}  // namespace dualmax
