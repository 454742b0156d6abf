#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cra {

enum class ErrorCode {
  MalformedJson,
  UnsupportedVersion,
  DanglingReference,
  InvalidDump,
  AuthFailure,
  NetworkFailure,
  SchemaMismatch,
  EmptyCorpus,
  DimensionMismatch,
  EmptyTrainingSet,
  TooFewSamples,
  SingleMinoritySample,
  SingleClassTraining,
  NonFiniteFeature,
  LengthMismatch,
  ArtifactVersionMismatch,
  StorageFailure,
  NotChangeAuthor,
  UnknownComment,
  InvalidArgument,
  IoFailure,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI and HTTP layers can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace cra
