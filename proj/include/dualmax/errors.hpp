#pragma once

#include <stdexcept>
#include <string>

namespace dualmax {

// Every failure the library can signal, grouped roughly by where it arises:
// input validation, domain violations, assumption gating, solver breakdowns,
// and IO.  The CLI maps these onto exit codes, so the code enum is part of
// the public surface.
enum class Errc {
  // input validation
  NonPositivePrice,
  ProbabilityNotNormalized,
  RaggedTree,
  DimensionMismatch,
  MissingNode,
  // domain violations
  NonPositivePoint,
  NegativeArgument,
  OutsideDomain,
  // assumption / feasibility gating
  InfeasibleDualDomain,
  WealthBelowEndowmentBound,
  AssumptionFailure,
  // solver breakdowns
  NoConvergence,
  DualUnboundedBelow,
  NodeDecompositionFailure,
  RelationViolated,
  // oracle guards
  DimensionTooLarge,
  EmptyFeasibleGrid,
  // IO
  ParseError,
  // should-not-happen internal invariant breaks
  InternalError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dualmax
