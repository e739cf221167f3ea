#pragma once

#include <stdexcept>
#include <string>

namespace botdetect {

enum class ErrorCode {
  // ingest
  MissingUserId,
  TypeCoercionFailure,
  UnreadableStream,
  IoError,
  ParseError,
  // features
  EmptyCorpus,
  EmptyVocabulary,
  // learners
  EmptyTrainingSet,
  InconsistentDimensions,
  SingleClassTraining,
  DimensionMismatch,
  // calibration
  SingleClassCalibration,
  NonFiniteScore,
  TooFewSamples,
  // evaluation
  SingleClassDataset,
  TooFewPerClass,
  LengthMismatch,
  EmptyInput,
  // ensemble
  EmptyResults,
  // modelstore
  VersionMismatch,
  CorruptModel,
  // synth / config
  InvalidConfig,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingUserId: return "MissingUserId";
    case ErrorCode::TypeCoercionFailure: return "TypeCoercionFailure";
    case ErrorCode::UnreadableStream: return "UnreadableStream";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::SingleClassTraining: return "SingleClassTraining";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingleClassCalibration: return "SingleClassCalibration";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::TooFewPerClass: return "TooFewPerClass";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyResults: return "EmptyResults";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "UnknownError";
}

/// Toolkit-wide exception carrying a stable error code plus context.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace botdetect
