#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wlingam {

enum class ErrorCode {
  InvalidArgument,
  OutOfRange,
  UnknownVariable,
  NonNumeric,
  BinaryDomainViolation,
  EmptyResult,
  SchemaInvalid,
  DimensionMismatch,
  BlockOrderInconsistent,
  RankDeficient,
  ZeroVariance,
  MaskInfeasible,
  NonAdmissibleModel,
  MissingAuxiliary,
  HorizonOutOfRange,
  OracleTooLarge,
  AllReplicatesDegenerate,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code);

/// Validation errors describe bad inputs (exit code 1 in the CLI); the rest
/// are runtime failures (exit code 2).
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix that what() carries.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace wlingam
