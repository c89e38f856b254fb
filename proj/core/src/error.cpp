#include "wlingam/error.hpp"

namespace wlingam {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::BinaryDomainViolation: return "BinaryDomainViolation";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::SchemaInvalid: return "SchemaInvalid";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BlockOrderInconsistent: return "BlockOrderInconsistent";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::MaskInfeasible: return "MaskInfeasible";
    case ErrorCode::NonAdmissibleModel: return "NonAdmissibleModel";
    case ErrorCode::MissingAuxiliary: return "MissingAuxiliary";
    case ErrorCode::HorizonOutOfRange: return "HorizonOutOfRange";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::AllReplicatesDegenerate: return "AllReplicatesDegenerate";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::ZeroVariance:
    case ErrorCode::MaskInfeasible:
    case ErrorCode::AllReplicatesDegenerate:
    case ErrorCode::Io:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

}  // namespace wlingam
