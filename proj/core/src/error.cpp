#include "infodesign/error.hpp"

namespace infodesign {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnreachableDestination: return "UnreachableDestination";
    case ErrorCode::DuplicateEdgeId: return "DuplicateEdgeId";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::PathExplosion: return "PathExplosion";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::EmptySpec: return "EmptySpec";
    case ErrorCode::InvalidGridSize: return "InvalidGridSize";
    case ErrorCode::UnsupportedDistribution: return "UnsupportedDistribution";
    case ErrorCode::SingularIntegrand: return "SingularIntegrand";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::DegenerateSignal: return "DegenerateSignal";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ZeroOptimalCost: return "ZeroOptimalCost";
    case ErrorCode::DegenerateInstance: return "DegenerateInstance";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::FileIO: return "FileIO";
  }
  return "Unknown";
}

bool is_solver_error(ErrorCode code) {
  return code == ErrorCode::SolverDivergence || code == ErrorCode::Infeasible ||
         code == ErrorCode::ZeroOptimalCost;
}

}  // namespace infodesign
