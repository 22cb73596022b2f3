#include "fatigue/error.hpp"

namespace fatigue {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FieldCountMismatch: return "FieldCountMismatch";
    case ErrorCode::NonNumericField: return "NonNumericField";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::InvalidFrameId: return "InvalidFrameId";
    case ErrorCode::InvalidTimestamp: return "InvalidTimestamp";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MixedLabeling: return "MixedLabeling";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DegenerateHorizontal: return "DegenerateHorizontal";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NonPositiveFps: return "NonPositiveFps";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SingularLeaf: return "SingularLeaf";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::ModelFormatError: return "ModelFormatError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::AllFramesDegenerate: return "AllFramesDegenerate";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error::Error(ErrorCode code, std::size_t line, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " (line " + std::to_string(line) +
                         "): " + message),
      code_(code),
      line_(line) {}

Error Error::with_cause(ErrorCode cause) const {
  Error copy = *this;
  copy.cause_ = cause;
  return copy;
}

}  // namespace fatigue
