#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fatigue {

inline constexpr std::size_t kLandmarkCount = 68;

/// Positive class is fatigue.
enum class Label : std::uint8_t { NonFatigue = 0, Fatigue = 1 };

inline constexpr int to_int(Label label) { return static_cast<int>(label); }

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using LandmarkPoints = std::array<Point, kLandmarkCount>;

// Standard 68-point layout. Each eye is stored corner, upper, upper, corner,
// lower, lower, walking clockwise in image coordinates. The inner lip starts
// at the left corner, runs along the upper contour to the right corner and
// back along the lower contour.
namespace landmark_index {
inline constexpr std::size_t kLeftEyeFirst = 36;
inline constexpr std::size_t kRightEyeFirst = 42;
inline constexpr std::size_t kInnerLipFirst = 60;
inline constexpr std::size_t kInnerLipLeftCorner = 60;
inline constexpr std::size_t kInnerLipUpperLeft = 61;
inline constexpr std::size_t kInnerLipUpperMid = 62;
inline constexpr std::size_t kInnerLipUpperRight = 63;
inline constexpr std::size_t kInnerLipRightCorner = 64;
inline constexpr std::size_t kInnerLipLowerRight = 65;
inline constexpr std::size_t kInnerLipLowerMid = 66;
inline constexpr std::size_t kInnerLipLowerLeft = 67;
}  // namespace landmark_index

struct LandmarkFrame {
  std::uint64_t frame_id = 0;
  LandmarkPoints points{};
  std::optional<double> timestamp_s;

  friend bool operator==(const LandmarkFrame&, const LandmarkFrame&) = default;
};

/// A frame with an optional ground-truth label. Datasets are either fully
/// labeled or fully unlabeled.
struct Sample {
  LandmarkFrame frame;
  std::optional<Label> label;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  std::vector<Sample> samples;
  std::string provenance;  // not persisted by write_dataset

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  bool labeled() const { return !samples.empty() && samples.front().label.has_value(); }

  std::vector<LandmarkFrame> frames() const;
  /// Throws MixedLabeling/EmptyDataset unless every sample is labeled.
  std::vector<Label> labels() const;
};

/// Checks the per-frame invariants: finite coordinates and timestamp >= 0.
void validate_frame(const LandmarkFrame& frame);

/// Checks frame invariants plus strictly increasing frame ids and
/// homogeneous labeling. An empty dataset is accepted here.
void validate_dataset(const Dataset& dataset);

// --- delimited text / JSONL persistence -----------------------------------

enum class DataFormat { Csv, Jsonl };

std::string_view to_string(DataFormat format);
DataFormat parse_data_format(std::string_view name);
/// `.jsonl` / `.ndjson` select Jsonl; everything else is Csv.
DataFormat format_from_path(const std::filesystem::path& path);

/// Column layout of a CSV file: frame_id, [label], [timestamp_s], x0, y0, ... x67, y67.
struct CsvSchema {
  bool has_label = false;
  bool has_timestamp = false;

  std::size_t field_count() const;
  std::string header() const;
  /// Throws Error{BadHeader} when the header does not match a known layout.
  static CsvSchema from_header(std::string_view header_line);

  friend bool operator==(const CsvSchema&, const CsvSchema&) = default;
};

/// Parses and validates one CSV data line. Errors: FieldCountMismatch,
/// NonNumericField, NonFiniteCoordinate, InvalidLabel, InvalidFrameId,
/// InvalidTimestamp.
Sample parse_frame_record(std::string_view record, const CsvSchema& schema);

/// Same contract for one JSONL object line.
Sample parse_json_record(std::string_view record);

/// Row order is preserved. Record failures surface as Error{ParseError} with
/// the 1-based physical line number and the record-level cause attached.
Dataset read_dataset(std::istream& in, DataFormat format, std::string provenance = {});
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
Dataset load_dataset(const std::filesystem::path& path);

void write_dataset(const Dataset& dataset, std::ostream& out, DataFormat format);
void write_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format);

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

}  // namespace fatigue
