#include "lrexp/error.hpp"

namespace lrexp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::EmptyRow: return "EmptyRow";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::RankNotOne: return "RankNotOne";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace lrexp
