#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "fatigue/error.hpp"
#include "fatigue/landmarks.hpp"
#include "json.hpp"

namespace fatigue {

namespace {

using json = nlohmann::json;

constexpr std::string_view kWhitespace = " \t\r\n";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

// from_chars accepts "inf" and "nan"; those are numeric here and rejected
// later as non-finite.
std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::uint64_t parse_frame_id(std::string_view text) {
  if (!text.empty() && text.front() == '-') {
    if (parse_double(text)) throw Error(ErrorCode::InvalidFrameId, "negative frame_id '" + std::string(text) + "'");
    throw Error(ErrorCode::NonNumericField, "frame_id '" + std::string(text) + "' is not numeric");
  }
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec == std::errc() && ptr == end && !text.empty()) return value;
  if (parse_double(text)) {
    throw Error(ErrorCode::InvalidFrameId, "frame_id '" + std::string(text) + "' is not a non-negative integer");
  }
  throw Error(ErrorCode::NonNumericField, "frame_id '" + std::string(text) + "' is not numeric");
}

Label label_from_number(double value, std::string_view text) {
  if (value == 0.0) return Label::NonFatigue;
  if (value == 1.0) return Label::Fatigue;
  throw Error(ErrorCode::InvalidLabel, "label '" + std::string(text) + "' is not 0 or 1");
}

Label parse_label(std::string_view text) {
  const auto value = parse_double(text);
  if (!value) throw Error(ErrorCode::NonNumericField, "label '" + std::string(text) + "' is not numeric");
  return label_from_number(*value, text);
}

std::optional<double> parse_timestamp(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const auto value = parse_double(text);
  if (!value) throw Error(ErrorCode::NonNumericField, "timestamp_s '" + std::string(text) + "' is not numeric");
  return value;
}

double parse_coordinate(std::string_view text, std::size_t field) {
  const auto value = parse_double(text);
  if (!value) {
    throw Error(ErrorCode::NonNumericField,
                "coordinate field " + std::to_string(field) + " '" + std::string(text) + "' is not numeric");
  }
  if (!std::isfinite(*value)) {
    throw Error(ErrorCode::NonFiniteCoordinate, "coordinate field " + std::to_string(field) + " is not finite");
  }
  return *value;
}

std::string coordinate_name(std::size_t point, bool is_y) {
  return (is_y ? "y" : "x") + std::to_string(point);
}

Error as_parse_error(const Error& cause, std::size_t line) {
  return Error(ErrorCode::ParseError, line, cause.what()).with_cause(cause.code());
}

void check_sequence(const Sample& sample, const std::vector<Sample>& previous) {
  if (previous.empty()) return;
  if (sample.frame.frame_id <= previous.back().frame.frame_id) {
    throw Error(ErrorCode::InvalidFrameId, "frame_id " + std::to_string(sample.frame.frame_id) +
                                               " does not increase after " +
                                               std::to_string(previous.back().frame.frame_id));
  }
  if (sample.label.has_value() != previous.front().label.has_value()) {
    throw Error(ErrorCode::MixedLabeling, "labeled and unlabeled records mixed in one dataset");
  }
}

double json_number(const json& value, const char* what) {
  if (!value.is_number()) throw Error(ErrorCode::NonNumericField, std::string(what) + " is not numeric");
  return value.get<double>();
}

}  // namespace

std::vector<LandmarkFrame> Dataset::frames() const {
  std::vector<LandmarkFrame> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.frame);
  return out;
}

std::vector<Label> Dataset::labels() const {
  if (samples.empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no samples");
  std::vector<Label> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.label) throw Error(ErrorCode::MixedLabeling, "dataset is not fully labeled");
    out.push_back(*s.label);
  }
  return out;
}

void validate_frame(const LandmarkFrame& frame) {
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const auto& p = frame.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::NonFiniteCoordinate,
                  "frame " + std::to_string(frame.frame_id) + " point " + std::to_string(i) + " is not finite");
    }
  }
  if (frame.timestamp_s && (!std::isfinite(*frame.timestamp_s) || *frame.timestamp_s < 0.0)) {
    throw Error(ErrorCode::InvalidTimestamp,
                "frame " + std::to_string(frame.frame_id) + " timestamp must be finite and non-negative");
  }
}

void validate_dataset(const Dataset& dataset) {
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const auto& sample = dataset.samples[i];
    validate_frame(sample.frame);
    if (i > 0) {
      const auto& prev = dataset.samples[i - 1];
      if (sample.frame.frame_id <= prev.frame.frame_id) {
        throw Error(ErrorCode::InvalidFrameId, "frame ids must be strictly increasing");
      }
      if (sample.label.has_value() != prev.label.has_value()) {
        throw Error(ErrorCode::MixedLabeling, "labeled and unlabeled samples mixed in one dataset");
      }
    }
  }
}

std::string_view to_string(DataFormat format) {
  return format == DataFormat::Csv ? "csv" : "jsonl";
}

DataFormat parse_data_format(std::string_view name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "jsonl") return DataFormat::Jsonl;
  throw Error(ErrorCode::IoError, "unknown data format '" + std::string(name) + "'");
}

DataFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".ndjson") ? DataFormat::Jsonl : DataFormat::Csv;
}

std::size_t CsvSchema::field_count() const {
  return 1 + (has_label ? 1 : 0) + (has_timestamp ? 1 : 0) + 2 * kLandmarkCount;
}

std::string CsvSchema::header() const {
  std::string out = "frame_id";
  if (has_label) out += ",label";
  if (has_timestamp) out += ",timestamp_s";
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    out += "," + coordinate_name(i, false) + "," + coordinate_name(i, true);
  }
  return out;
}

CsvSchema CsvSchema::from_header(std::string_view header_line) {
  // Tolerate a UTF-8 byte order mark.
  if (header_line.substr(0, 3) == "\xEF\xBB\xBF") header_line.remove_prefix(3);
  const auto fields = split_fields(header_line);
  CsvSchema schema;
  std::size_t pos = 0;
  if (fields.empty() || fields[pos] != "frame_id") {
    throw Error(ErrorCode::BadHeader, "header must start with frame_id");
  }
  ++pos;
  if (pos < fields.size() && fields[pos] == "label") {
    schema.has_label = true;
    ++pos;
  }
  if (pos < fields.size() && fields[pos] == "timestamp_s") {
    schema.has_timestamp = true;
    ++pos;
  }
  if (fields.size() != schema.field_count()) {
    throw Error(ErrorCode::BadHeader, "header has " + std::to_string(fields.size()) + " columns, expected " +
                                          std::to_string(schema.field_count()));
  }
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    if (fields[pos] != coordinate_name(i, false) || fields[pos + 1] != coordinate_name(i, true)) {
      throw Error(ErrorCode::BadHeader, "expected columns " + coordinate_name(i, false) + "," +
                                            coordinate_name(i, true) + " at position " + std::to_string(pos));
    }
    pos += 2;
  }
  return schema;
}

Sample parse_frame_record(std::string_view record, const CsvSchema& schema) {
  const auto fields = split_fields(trim(record));
  if (fields.size() != schema.field_count()) {
    throw Error(ErrorCode::FieldCountMismatch, "record has " + std::to_string(fields.size()) +
                                                   " fields, expected " + std::to_string(schema.field_count()));
  }
  Sample sample;
  std::size_t pos = 0;
  sample.frame.frame_id = parse_frame_id(fields[pos++]);
  if (schema.has_label) sample.label = parse_label(fields[pos++]);
  if (schema.has_timestamp) sample.frame.timestamp_s = parse_timestamp(fields[pos++]);
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    sample.frame.points[i].x = parse_coordinate(fields[pos], pos);
    ++pos;
    sample.frame.points[i].y = parse_coordinate(fields[pos], pos);
    ++pos;
  }
  validate_frame(sample.frame);
  return sample;
}

Sample parse_json_record(std::string_view record) {
  json object;
  try {
    object = json::parse(record);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::NonNumericField, std::string("malformed JSON record: ") + e.what());
  }
  if (!object.is_object()) throw Error(ErrorCode::FieldCountMismatch, "record is not a JSON object");
  for (const auto& [key, _] : object.items()) {
    if (key != "frame_id" && key != "label" && key != "timestamp_s" && key != "points") {
      throw Error(ErrorCode::FieldCountMismatch, "unexpected key '" + key + "'");
    }
  }
  Sample sample;
  if (!object.contains("frame_id")) throw Error(ErrorCode::FieldCountMismatch, "missing frame_id");
  const auto& id = object["frame_id"];
  if (id.is_number_unsigned()) {
    sample.frame.frame_id = id.get<std::uint64_t>();
  } else if (id.is_number()) {
    throw Error(ErrorCode::InvalidFrameId, "frame_id is not a non-negative integer");
  } else {
    throw Error(ErrorCode::NonNumericField, "frame_id is not numeric");
  }
  if (object.contains("label")) {
    const double value = json_number(object["label"], "label");
    sample.label = label_from_number(value, object["label"].dump());
  }
  if (object.contains("timestamp_s")) {
    sample.frame.timestamp_s = json_number(object["timestamp_s"], "timestamp_s");
  }
  if (!object.contains("points")) throw Error(ErrorCode::FieldCountMismatch, "missing points");
  const auto& points = object["points"];
  if (!points.is_array() || points.size() != kLandmarkCount) {
    throw Error(ErrorCode::FieldCountMismatch, "points must be an array of 68 [x, y] pairs");
  }
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const auto& pair = points[i];
    if (!pair.is_array() || pair.size() != 2) {
      throw Error(ErrorCode::FieldCountMismatch, "point " + std::to_string(i) + " is not an [x, y] pair");
    }
    sample.frame.points[i] = {json_number(pair[0], "coordinate"), json_number(pair[1], "coordinate")};
  }
  validate_frame(sample.frame);
  return sample;
}

Dataset read_dataset(std::istream& in, DataFormat format, std::string provenance) {
  Dataset dataset;
  dataset.provenance = std::move(provenance);
  std::optional<CsvSchema> schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      if (format == DataFormat::Csv && !schema) {
        schema = CsvSchema::from_header(line);
        continue;
      }
      Sample sample = format == DataFormat::Csv ? parse_frame_record(line, *schema) : parse_json_record(line);
      check_sequence(sample, dataset.samples);
      dataset.samples.push_back(std::move(sample));
    } catch (const Error& e) {
      throw as_parse_error(e, line_no);
    }
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failure in " + dataset.provenance);
  if (dataset.samples.empty()) throw Error(ErrorCode::EmptyDataset, "no records in " + dataset.provenance);
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return read_dataset(in, format, path.string());
}

Dataset load_dataset(const std::filesystem::path& path) { return load_dataset(path, format_from_path(path)); }

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void write_dataset(const Dataset& dataset, std::ostream& out, DataFormat format) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "refusing to write an empty dataset");
  validate_dataset(dataset);
  const bool has_label = dataset.labeled();
  bool has_timestamp = false;
  for (const auto& s : dataset.samples) has_timestamp = has_timestamp || s.frame.timestamp_s.has_value();

  if (format == DataFormat::Csv) {
    const CsvSchema schema{has_label, has_timestamp};
    out << schema.header() << '\n';
    std::string row;
    for (const auto& s : dataset.samples) {
      row = std::to_string(s.frame.frame_id);
      if (has_label) row += "," + std::to_string(to_int(*s.label));
      if (has_timestamp) row += "," + (s.frame.timestamp_s ? format_double(*s.frame.timestamp_s) : std::string());
      for (const auto& p : s.frame.points) {
        row += ',';
        row += format_double(p.x);
        row += ',';
        row += format_double(p.y);
      }
      out << row << '\n';
    }
  } else {
    for (const auto& s : dataset.samples) {
      nlohmann::ordered_json object;
      object["frame_id"] = s.frame.frame_id;
      if (s.label) object["label"] = to_int(*s.label);
      if (s.frame.timestamp_s) object["timestamp_s"] = *s.frame.timestamp_s;
      auto points = nlohmann::ordered_json::array();
      for (const auto& p : s.frame.points) points.push_back({p.x, p.y});
      object["points"] = std::move(points);
      out << object.dump() << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failure");
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  write_dataset(dataset, out, format);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failure on '" + path.string() + "'");
}

}  // namespace fatigue
