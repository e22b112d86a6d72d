#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace handsteer {

enum class ErrorCode {
  InvalidArgument,
  // signal
  NonFiniteInput,
  ZeroNormal,
  WrongWindowLength,
  TooShort,
  TargetTooSmall,
  UnknownPosture,
  IllegalTransition,
  BadScenario,
  // dictionary / classifiers
  RaggedColumns,
  EmptyClass,
  ZeroColumn,
  SingularGram,
  DimensionMismatch,
  NonConvergence,
  // clustering / training
  TooSmall,
  ClusterTooSmall,
  MissingRecording,
  // persistence and I/O
  IOFailure,
  BadFormat,
  ChecksumMismatch,
  // service
  BadMessage,
  ModelMissing,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace handsteer
