#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fatigue {

enum class ErrorCode {
  // landmark_io
  FieldCountMismatch,
  NonNumericField,
  NonFiniteCoordinate,
  InvalidLabel,
  InvalidFrameId,
  InvalidTimestamp,
  BadHeader,
  ParseError,
  EmptyDataset,
  MixedLabeling,
  IoError,
  // facial_features
  DegenerateHorizontal,
  EmptySeries,
  NonPositiveFps,
  InvalidThreshold,
  // boosted_trees
  InvalidConfig,
  SingularLeaf,
  DegenerateLabels,
  NonFiniteFeature,
  ArityMismatch,
  ModelFormatError,
  VersionMismatch,
  // evaluation
  EmptyPartition,
  LengthMismatch,
  InvalidProbability,
  EmptyMatrix,
  NoPositives,
  // stream_fatigue
  EmptyStream,
  AllFramesDegenerate,
  // synth_data
  InvalidSpec,
};

std::string_view to_string(ErrorCode code);

/// Every domain failure in the library is reported as an Error carrying a
/// machine-checkable code. ParseError additionally carries the 1-based
/// physical line number of the offending record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, std::size_t line, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

  /// Code of the record-level failure that caused a ParseError, if any.
  std::optional<ErrorCode> cause() const noexcept { return cause_; }
  Error with_cause(ErrorCode cause) const;

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::optional<ErrorCode> cause_;
};

}  // namespace fatigue
