#pragma once

#include <stdexcept>
#include <string>

namespace semnav {

enum class ErrorCode {
  kDegenerateInput,
  kTopologyError,
  kNegativeRadius,
  kDegenerateVertex,
  kNoBoundaryAdjacentTriangle,
  kDegeneratePolygon,
  kSingularPoint,
  kSingularDenominator,
  kInadmissibleCollar,
  kOutOfDomain,
  kEmptyCell,
  kSingularJacobian,
  kGoalAtCenter,
  kLeftFreespace,
  kParseError,
  kValidation,
};

const char* error_name(ErrorCode code);

// Single exception type for the library; the code tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace semnav
