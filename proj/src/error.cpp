#include "handsteer/error.hpp"

namespace handsteer {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ZeroNormal: return "ZeroNormal";
    case ErrorCode::WrongWindowLength: return "WrongWindowLength";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::TargetTooSmall: return "TargetTooSmall";
    case ErrorCode::UnknownPosture: return "UnknownPosture";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::BadScenario: return "BadScenario";
    case ErrorCode::RaggedColumns: return "RaggedColumns";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::ClusterTooSmall: return "ClusterTooSmall";
    case ErrorCode::MissingRecording: return "MissingRecording";
    case ErrorCode::IOFailure: return "IOFailure";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::BadMessage: return "BadMessage";
    case ErrorCode::ModelMissing: return "ModelMissing";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace handsteer
