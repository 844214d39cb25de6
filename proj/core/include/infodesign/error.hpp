#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infodesign {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  UnreachableDestination,
  DuplicateEdgeId,
  UnknownNode,
  PathExplosion,
  NegativeCoefficient,
  EmptySpec,
  InvalidGridSize,
  UnsupportedDistribution,
  SingularIntegrand,
  SolverDivergence,
  DegenerateSignal,
  Infeasible,
  ZeroOptimalCost,
  DegenerateInstance,
  ConfigParse,
  FileIO,
};

std::string_view to_string(ErrorCode code);

// Solver failures map to exit status 1 in the CLI, everything else is an input problem.
bool is_solver_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace infodesign
