#include "semnav/errors.hpp"

namespace semnav {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kTopologyError: return "TopologyError";
    case ErrorCode::kNegativeRadius: return "NegativeRadius";
    case ErrorCode::kDegenerateVertex: return "DegenerateVertex";
    case ErrorCode::kNoBoundaryAdjacentTriangle: return "NoBoundaryAdjacentTriangle";
    case ErrorCode::kDegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::kSingularPoint: return "SingularPoint";
    case ErrorCode::kSingularDenominator: return "SingularDenominator";
    case ErrorCode::kInadmissibleCollar: return "InadmissibleCollar";
    case ErrorCode::kOutOfDomain: return "OutOfDomain";
    case ErrorCode::kEmptyCell: return "EmptyCell";
    case ErrorCode::kSingularJacobian: return "SingularJacobian";
    case ErrorCode::kGoalAtCenter: return "GoalAtCenter";
    case ErrorCode::kLeftFreespace: return "LeftFreespace";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidation: return "ValidationError";
  }
  return "Error";
}

}  // namespace semnav
