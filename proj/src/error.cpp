#include "cra/error.hpp"

namespace cra {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::InvalidDump: return "InvalidDump";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::NetworkFailure: return "NetworkFailure";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingleMinoritySample: return "SingleMinoritySample";
    case ErrorCode::SingleClassTraining: return "SingleClassTraining";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ArtifactVersionMismatch: return "ArtifactVersionMismatch";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::NotChangeAuthor: return "NotChangeAuthor";
    case ErrorCode::UnknownComment: return "UnknownComment";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace cra
